//! Kron reduction: eliminate interior nodes by the generalized Schur
//! complement and read the result back as a signed graph on the retained
//! terminals.
//!
//! The reduced matrix keeps zero row sums, so it is again a Laplacian, and it
//! is electrically equivalent to the original network at the retained nodes
//! (same effective resistances, same port behaviour).

use serde::Serialize;

use crate::graph::{SignedGraph, UnionFind};
use crate::numerics::{self, SymmetricMatrix, TolerancePolicy};
use crate::{Error, Result};

/// Outcome of eliminating `beta` from the network.
#[derive(Clone, Debug, Serialize)]
pub struct KronResult {
    /// Retained node labels (1-based, ascending, original numbering). Row k
    /// of `l_r` corresponds to `alpha[k]`.
    pub alpha: Vec<usize>,
    /// Eliminated node labels (1-based, ascending, original numbering).
    pub beta: Vec<usize>,
    /// Reduced Laplacian L_aa - L_ab (L_bb)^+ L_ba.
    pub l_r: SymmetricMatrix,
    /// The reduced matrix reinterpreted as a graph on nodes 1..=|alpha|
    /// (relabelled in `alpha` order). Entries within the zero band of the
    /// tolerance policy are dropped rather than kept as spurious edges.
    pub reduced_graph: SignedGraph,
    /// Set when the sparsity pattern of the input is disconnected. The
    /// eliminated block is then allowed to be singular and the reduction
    /// falls back to its pseudoinverse.
    pub disconnected_input: bool,
}

/// Nodes incident to at least one negative edge, ascending. These are the
/// terminals the certification and inertia routes retain.
pub fn external_terminals(g: &SignedGraph) -> Result<Vec<usize>> {
    let mut nodes: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| e.weight < 0.0)
        .flat_map(|e| [e.i, e.j])
        .collect();
    if nodes.is_empty() {
        return Err(Error::NoNegativeEdges);
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

fn validate_alpha(n: usize, alpha: &[usize]) -> Result<Vec<usize>> {
    let mut keep = alpha.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.len() < 2 {
        return Err(Error::AlphaTooSmall { got: keep.len() });
    }
    if keep.len() >= n || keep.iter().any(|&v| v < 1 || v > n) {
        return Err(Error::AlphaNotProper);
    }
    Ok(keep)
}

/// Number of connected components of the sparsity pattern of `l` (exact
/// nonzero off-diagonals; a Laplacian entry is zero iff the edge is absent).
fn pattern_components(l: &SymmetricMatrix) -> usize {
    let n = l.order();
    let mut uf = UnionFind::new(n);
    let mut count = n;
    for i in 0..n {
        for j in (i + 1)..n {
            if l.get(i, j) != 0.0 && uf.union(i, j) {
                count -= 1;
            }
        }
    }
    count
}

/// Eliminates every node not listed in `alpha` (1-based labels, at least two
/// of them, and at least one node must go).
pub fn kron_reduce(l: &SymmetricMatrix, alpha: &[usize], tol: &TolerancePolicy) -> Result<KronResult> {
    let n = l.order();
    let keep = validate_alpha(n, alpha)?;
    let beta: Vec<usize> = (1..=n).filter(|v| !keep.contains(v)).collect();
    let keep0: Vec<usize> = keep.iter().map(|&v| v - 1).collect();

    let l_r = numerics::schur_complement(l, &keep0, tol)?;

    // Read edges off the reduced matrix; entries indistinguishable from zero
    // are treated as absent couplings.
    let tau = tol.tau(l_r.max_abs());
    let mut edges = Vec::new();
    for i in 0..keep.len() {
        for j in (i + 1)..keep.len() {
            let coupling = -l_r.get(i, j);
            if coupling.abs() > tau {
                edges.push((i + 1, j + 1, coupling));
            }
        }
    }
    let reduced_graph = SignedGraph::build(keep.len(), &edges)?;

    Ok(KronResult {
        alpha: keep,
        beta,
        l_r,
        reduced_graph,
        disconnected_input: pattern_components(l) != 1,
    })
}

/// Inertia of the interior block L_bb that the reduction eliminates. When
/// every interior node touches only positive edges (alpha covers the
/// negative-edge endpoints) and the graph is connected, this block is
/// positive definite, which licenses the congruence bookkeeping
/// inertia(L) = inertia(L_r) + (0, 0, |beta|).
pub fn eliminated_block_inertia(
    l: &SymmetricMatrix,
    result: &KronResult,
    tol: &TolerancePolicy,
) -> Result<numerics::Inertia> {
    let drop0: Vec<usize> = result.beta.iter().map(|&v| v - 1).collect();
    if drop0.is_empty() {
        return Err(Error::EmptyBlock);
    }
    numerics::inertia(&l.principal_submatrix(&drop0), tol)
}
