//! Resistive multiport view of a (signed) Laplacian: effective and transfer
//! effective resistances, port resistance/conductance matrices, and the
//! open-circuit / short-circuit / parallel-connection algebra.
//!
//! A port is an ordered terminal pair (s, t); injecting current at s and
//! extracting it at t applies the vector d_st = e_s - e_t. Port matrices are
//! computed from the pseudoinverse directly, never by simulation:
//! Z = D_p' L^+ D_p and Y = Z^+.

use serde::Serialize;

use crate::graph::{SignSplit, SpanningForest};
use crate::numerics::{self, SymmetricMatrix, TolerancePolicy};
use crate::{Error, Result};

/// Relative residual above which a port current pattern is declared
/// unsupportable by the network (its incidence vector has a component in the
/// kernel of L, e.g. a port across disconnected parts). Z is then undefined.
const KERNEL_RESIDUAL_REL: f64 = 1e-6;

/// Ordered list of terminal pairs on nodes 1..=n. Ports may share terminals
/// but must be distinct as unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PortSpec {
    n: usize,
    ports: Vec<(usize, usize)>,
}

impl PortSpec {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (index, &(s, t)) in pairs.iter().enumerate() {
            if s == t {
                return Err(Error::PortSelfPair { index, s });
            }
            if s < 1 || s > n || t < 1 || t > n {
                return Err(Error::PortNodeOutOfRange { index, s, t, n });
            }
            if !seen.insert((s.min(t), s.max(t))) {
                return Err(Error::DuplicatePort { index, s, t });
            }
        }
        Ok(PortSpec {
            n,
            ports: pairs.to_vec(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn ports(&self) -> &[(usize, usize)] {
        &self.ports
    }

    pub fn len(&self) -> usize {
        self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }
}

/// Port resistance and conductance matrices. Y is always well-defined; Z is
/// absent (with a reason) when some port current pattern is unsupportable.
#[derive(Clone, Debug, Serialize)]
pub struct PortMatrixPair {
    pub ports: Vec<(usize, usize)>,
    pub z: Option<SymmetricMatrix>,
    pub z_undefined_reason: Option<String>,
    pub y: SymmetricMatrix,
}

/// d_ij' L^+ d_ij read directly off four pseudoinverse entries. Nodes are
/// 1-based. May be negative or zero on signed graphs.
pub fn effective_resistance(
    l: &SymmetricMatrix,
    i: usize,
    j: usize,
    tol: &TolerancePolicy,
) -> Result<f64> {
    let li = numerics::pinv(l, tol)?;
    Ok(effective_resistance_from_pinv(&li, i, j))
}

/// Same as [`effective_resistance`] but reusing an existing pseudoinverse.
pub fn effective_resistance_from_pinv(li: &SymmetricMatrix, i: usize, j: usize) -> f64 {
    transfer_from_pinv(li, (i, j), (i, j))
}

/// d_st' L^+ d_ij: the voltage across (s, t) under unit current across (i, j).
/// Symmetric under exchanging the two pairs.
pub fn transfer_effective_resistance(
    l: &SymmetricMatrix,
    st: (usize, usize),
    ij: (usize, usize),
    tol: &TolerancePolicy,
) -> Result<f64> {
    let li = numerics::pinv(l, tol)?;
    Ok(transfer_from_pinv(&li, st, ij))
}

/// Same as [`transfer_effective_resistance`] from an existing pseudoinverse.
pub fn transfer_from_pinv(li: &SymmetricMatrix, st: (usize, usize), ij: (usize, usize)) -> f64 {
    let (s, t) = (st.0 - 1, st.1 - 1);
    let (i, j) = (ij.0 - 1, ij.1 - 1);
    li.get(s, i) - li.get(s, j) - li.get(t, i) + li.get(t, j)
}

/// Port matrices of the network described by Laplacian `l` over the given
/// ports: Z = D_p' L^+ D_p entry by entry, Y = Z^+.
pub fn port_matrices(
    l: &SymmetricMatrix,
    ports: &PortSpec,
    tol: &TolerancePolicy,
) -> Result<PortMatrixPair> {
    let li = numerics::pinv(l, tol)?;
    let pairs = ports.ports();
    let z_raw = SymmetricMatrix::from_fn(pairs.len(), |a, b| {
        transfer_from_pinv(&li, pairs[a], pairs[b])
    });
    let y = numerics::pinv(&z_raw, tol)?;

    // A port is supportable iff its incidence vector survives the projection
    // L L^+; a kernel component means the current pattern has no finite
    // voltage response and Z is not a resistance matrix.
    let mut reason = None;
    for (index, &(s, t)) in pairs.iter().enumerate() {
        let mut d = vec![0.0; l.order()];
        d[s - 1] = 1.0;
        d[t - 1] = -1.0;
        let projected = l.matvec(&li.matvec(&d));
        let residual: f64 = d
            .iter()
            .zip(&projected)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if residual > KERNEL_RESIDUAL_REL * 2f64.sqrt() {
            reason = Some(format!(
                "port {} ({}, {}) spans parts of the network with no conducting path",
                index, s, t
            ));
            break;
        }
    }
    Ok(PortMatrixPair {
        ports: pairs.to_vec(),
        z: if reason.is_none() { Some(z_raw) } else { None },
        z_undefined_reason: reason,
        y,
    })
}

/// Port matrices of the positive and negative parts over the same ports,
/// taken from a spanning forest of the negative part (edges stored i < j, so
/// the orientation is the deterministic head-at-smaller-index convention).
pub fn split_port_matrices(
    split: &SignSplit,
    forest: &SpanningForest,
    tol: &TolerancePolicy,
) -> Result<(PortMatrixPair, PortMatrixPair)> {
    if forest.m_f == 0 {
        return Err(Error::EmptyForest);
    }
    let pairs: Vec<(usize, usize)> = forest
        .edge_indices
        .iter()
        .map(|&k| {
            let e = split.negative.edges()[k];
            (e.i, e.j)
        })
        .collect();
    let ports = PortSpec::new(split.negative.node_count(), &pairs)?;
    let plus = port_matrices(&split.positive.laplacian(), &ports, tol)?;
    let minus = port_matrices(&split.negative.laplacian(), &ports, tol)?;
    Ok((plus, minus))
}

fn complement_ports(pair: &PortMatrixPair, subset: &[usize]) -> Result<Vec<usize>> {
    let p = pair.ports.len();
    let mut chosen = subset.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    if let Some(&bad) = chosen.iter().find(|&&k| k >= p) {
        return Err(Error::PortIndexOutOfRange {
            index: bad,
            count: p,
        });
    }
    Ok((0..p).filter(|k| !chosen.contains(k)).collect())
}

/// Open-circuits the listed ports (forcing their currents to zero): the
/// resistance matrix restricts to the remaining block, the conductance matrix
/// takes the generalized Schur complement of the opened block.
pub fn open_circuit(
    pair: &PortMatrixPair,
    opened: &[usize],
    tol: &TolerancePolicy,
) -> Result<PortMatrixPair> {
    if opened.is_empty() {
        return Ok(pair.clone());
    }
    let keep = complement_ports(pair, opened)?;
    if keep.is_empty() {
        return Err(Error::AllPortsOpened);
    }
    let y = numerics::schur_complement(&pair.y, &keep, tol)?;
    let z = pair.z.as_ref().map(|z| z.principal_submatrix(&keep));
    Ok(PortMatrixPair {
        ports: keep.iter().map(|&k| pair.ports[k]).collect(),
        z,
        z_undefined_reason: pair.z_undefined_reason.clone(),
        y,
    })
}

/// Short-circuits the listed ports (forcing their voltages to zero): dual to
/// [`open_circuit`], exchanging the roles of Z and Y.
pub fn short_circuit(
    pair: &PortMatrixPair,
    shorted: &[usize],
    tol: &TolerancePolicy,
) -> Result<PortMatrixPair> {
    if shorted.is_empty() {
        return Ok(pair.clone());
    }
    let keep = complement_ports(pair, shorted)?;
    if keep.is_empty() {
        return Err(Error::AllPortsShorted);
    }
    let y = pair.y.principal_submatrix(&keep);
    let z = match pair.z.as_ref() {
        Some(z) => Some(numerics::schur_complement(z, &keep, tol)?),
        None => None,
    };
    Ok(PortMatrixPair {
        ports: keep.iter().map(|&k| pair.ports[k]).collect(),
        z,
        z_undefined_reason: pair.z_undefined_reason.clone(),
        y,
    })
}

/// Conductance matrix of a parallel connection: Y = Ya + Yb.
pub fn parallel(ya: &SymmetricMatrix, yb: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    ya.add(yb)
}

/// Companion resistance form of the parallel connection:
/// Z = (Za^+ + Zb^+)^+.
pub fn parallel_resistance(
    za: &SymmetricMatrix,
    zb: &SymmetricMatrix,
    tol: &TolerancePolicy,
) -> Result<SymmetricMatrix> {
    let sum = numerics::pinv(za, tol)?.add(&numerics::pinv(zb, tol)?)?;
    numerics::pinv(&sum, tol)
}
