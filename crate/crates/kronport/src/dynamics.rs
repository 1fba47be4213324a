//! Application layer on top of the certification machinery: consensus
//! trajectories of x' = -L x with orthant-exit detection, DC power-flow
//! feasibility, and construction of angle-stability weights for equilibrium
//! screening.

use serde::Serialize;

use crate::analysis::{self, Verdict};
use crate::graph::SignedGraph;
use crate::numerics::{self, Inertia, TolerancePolicy};
use crate::{Error, Result};

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Spectral evaluator for exp(-L t) x0: eigenvalues plus each eigenvector
/// pre-scaled by its coefficient against x0. Exact at any t, no stepping.
#[derive(Clone, Debug, Default)]
struct Modes {
    eigenvalues: Vec<f64>,
    weighted: Vec<Vec<f64>>,
}

impl Modes {
    fn state_at(&self, t: f64) -> Vec<f64> {
        let n = self.weighted.first().map_or(0, Vec::len);
        let mut x = vec![0.0; n];
        for (lam, w) in self.eigenvalues.iter().zip(&self.weighted) {
            let decay = (-lam * t).exp();
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi += decay * wi;
            }
        }
        x
    }
}

/// Sampled solution of x' = -L x together with the certificate verdict for
/// the generating Laplacian.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One state vector per sample time.
    pub states: Vec<Vec<f64>>,
    /// The average of the initial state, which is the limit of every
    /// component exactly when the verdict is positive.
    pub consensus_value: Option<f64>,
    pub verdict: Verdict,
    pub marginal: bool,
    #[serde(skip)]
    modes: Modes,
}

impl Trajectory {
    /// Exact state at an arbitrary time, not restricted to the sample grid.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        self.modes.state_at(t)
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimeGrid {
            reason: "need at least one sample time".to_string(),
        });
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid {
            reason: "sample times must be finite".to_string(),
        });
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidTimeGrid {
            reason: format!("sample times must be nonnegative, got {}", times[0]),
        });
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidTimeGrid {
            reason: "sample times must be strictly increasing".to_string(),
        });
    }
    Ok(())
}

/// Evaluates x(t) = exp(-L t) x0 on the given sample grid through the
/// eigendecomposition of L, and tags the result with the oracle verdict.
pub fn simulate_consensus(
    g: &SignedGraph,
    x0: &[f64],
    times: &[f64],
    tol: &TolerancePolicy,
) -> Result<Trajectory> {
    let n = g.node_count();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            left: x0.len(),
            right: n,
        });
    }
    validate_times(times)?;
    let cert = analysis::certify_psd_oracle(g, tol)?;
    let eig = numerics::eigh(&g.laplacian())?;
    let weighted: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let v = eig.vector(k);
            let coeff: f64 = v.iter().zip(x0).map(|(a, b)| a * b).sum();
            v.into_iter().map(|a| a * coeff).collect()
        })
        .collect();
    let modes = Modes {
        eigenvalues: eig.eigenvalues.clone(),
        weighted,
    };
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let x = modes.state_at(t);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTimeGrid {
                reason: format!(
                    "state overflows at t = {t}; the dynamics diverge along a negative eigenvalue"
                ),
            });
        }
        states.push(x);
    }
    let consensus_value = if cert.is_psd_corank1() {
        Some(x0.iter().sum::<f64>() / n as f64)
    } else {
        None
    };
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        consensus_value,
        verdict: cert.verdict,
        marginal: cert.marginal,
        modes,
    })
}

/// One excursion of an agent below zero: when it left the nonnegative
/// orthant, when it came back (absent if still negative at the last sample),
/// and the deepest sampled point of the excursion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrthantExit {
    pub agent: usize,
    pub exit_time: f64,
    pub return_time: Option<f64>,
    pub min_value: f64,
    pub min_time: f64,
}

/// Finds every interval on which some component dips below -tau_state, with
/// tau_state = 1e-9 times the initial-state scale. Crossing times are
/// refined by bisection on the exact spectral solution, so a coarse sample
/// grid still yields accurate endpoints (though an excursion shorter than
/// one grid interval can be missed entirely).
pub fn orthant_exit_events(traj: &Trajectory, tol: &TolerancePolicy) -> Result<Vec<OrthantExit>> {
    let _ = tol;
    let first = match traj.states.first() {
        Some(s) => s,
        None => return Ok(Vec::new()),
    };
    let scale = first.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tau_state = 1e-9 * scale;
    for (i, &x) in first.iter().enumerate() {
        if x < -tau_state {
            return Err(Error::NegativeInitialCondition {
                index: i + 1,
                value: x,
            });
        }
    }

    let n = first.len();
    let samples = traj.times.len();
    let mut events = Vec::new();
    for agent in 0..n {
        let below_at = |t: f64| traj.state_at(t)[agent] < -tau_state;
        let refine = |mut lo: f64, mut hi: f64| {
            // invariant: the predicate flips between lo and hi
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if below_at(mid) == below_at(hi) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };

        let mut s = 1;
        while s < samples {
            if traj.states[s][agent] >= -tau_state {
                s += 1;
                continue;
            }
            let exit_time = refine(traj.times[s - 1], traj.times[s]);
            let mut r = s + 1;
            while r < samples && traj.states[r][agent] < -tau_state {
                r += 1;
            }
            let return_time = if r < samples {
                Some(refine(traj.times[r - 1], traj.times[r]))
            } else {
                None
            };
            let span_end = return_time.unwrap_or(traj.times[samples - 1]);
            let mut min_value = f64::INFINITY;
            let mut min_time = exit_time;
            let probes = 512;
            for k in 0..=probes {
                let t = exit_time + (span_end - exit_time) * k as f64 / probes as f64;
                let v = traj.state_at(t)[agent];
                if v < min_value {
                    min_value = v;
                    min_time = t;
                }
            }
            events.push(OrthantExit {
                agent: agent + 1,
                exit_time,
                return_time,
                min_value,
                min_time,
            });
            s = r + 1;
        }
    }
    Ok(events)
}

/// Solution and feasibility report for p = L theta.
#[derive(Clone, Debug, Serialize)]
pub struct PowerFlowCase {
    pub injections: Vec<f64>,
    /// Least-squares angles, shifted so the slack node sits at zero.
    pub angles: Vec<f64>,
    pub feasible: bool,
    pub residual: f64,
    /// 1-based slack node, by convention the highest-index node.
    pub slack: usize,
    pub marginal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<String>,
    /// Orthonormal kernel directions, reported when the kernel has dimension
    /// above one so the caller can see which angle patterns are free.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_basis: Option<Vec<Vec<f64>>>,
}

/// Solves the DC power-flow equations p = L theta. The case is feasible
/// exactly when L is PSD with a simple zero eigenvalue; otherwise the
/// least-squares solve is still returned as a diagnostic, with the reason
/// and, for a repeated zero eigenvalue, the kernel directions.
pub fn dc_power_flow(g: &SignedGraph, p: &[f64], tol: &TolerancePolicy) -> Result<PowerFlowCase> {
    let n = g.node_count();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: n,
        });
    }
    let imbalance = p.iter().sum::<f64>().abs();
    let limit = 1e-9 * l2(p);
    if imbalance > limit {
        return Err(Error::UnbalancedInjections { imbalance, limit });
    }
    let l = g.laplacian();
    let eig = numerics::eigh(&l)?;
    let class = tol.classify(&eig.eigenvalues, g.connected_components().count);
    let li = numerics::pinv(&l, tol)?;
    let mut angles: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| li.get(i, j) * p[j]).sum())
        .collect();
    if let Some(&last) = angles.last() {
        for a in &mut angles {
            *a -= last;
        }
    }
    let lx = l.matvec(&angles);
    let residual = l2(&lx
        .iter()
        .zip(p)
        .map(|(a, b)| a - b)
        .collect::<Vec<f64>>());
    let feasible = class.inertia == Inertia::new(0, 1, n.saturating_sub(1));
    let infeasibility = if feasible {
        None
    } else if class.inertia.minus > 0 {
        Some("indefinite".to_string())
    } else {
        Some(format!(
            "zero eigenvalue of multiplicity {}",
            class.inertia.zero
        ))
    };
    let kernel_basis = if class.inertia.zero > 1 {
        Some(
            (0..n)
                .filter(|&k| eig.eigenvalues[k].abs() <= class.tau)
                .map(|k| eig.vector(k))
                .collect(),
        )
    } else {
        None
    };
    Ok(PowerFlowCase {
        injections: p.to_vec(),
        angles,
        feasible,
        residual,
        slack: n,
        marginal: class.marginal,
        infeasibility,
        kernel_basis,
    })
}

/// Signed-weight screen of a power-system equilibrium.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumScreen {
    /// One weight per input line, including the dropped ones.
    pub weights: Vec<f64>,
    pub graph: SignedGraph,
    pub stable: bool,
    /// Number of negative Laplacian eigenvalues, which classifies the
    /// equilibrium type.
    pub type_index: usize,
    pub marginal: bool,
    /// 0-based positions of input lines whose weight came out exactly zero;
    /// such lines cannot be stored as edges and carry no coupling anyway.
    pub dropped: Vec<usize>,
}

/// Builds the signed stiffness graph w = V_i V_j B_ij cos(theta*_i -
/// theta*_j) for an equilibrium and classifies it: stable exactly when the
/// resulting Laplacian is PSD with a simple zero eigenvalue.
pub fn angle_stability_weights(
    lines: &[(usize, usize, f64)],
    v: &[f64],
    theta_star: &[f64],
    tol: &TolerancePolicy,
) -> Result<EquilibriumScreen> {
    if v.len() != theta_star.len() {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: theta_star.len(),
        });
    }
    for (i, &vi) in v.iter().enumerate() {
        if !vi.is_finite() || vi <= 0.0 {
            return Err(Error::NonpositiveVoltage {
                index: i + 1,
                value: vi,
            });
        }
    }
    let n = v.len();
    let mut weights = Vec::with_capacity(lines.len());
    let mut edges = Vec::new();
    let mut dropped = Vec::new();
    for (k, &(i, j, b)) in lines.iter().enumerate() {
        if i < 1 || i > n || j < 1 || j > n {
            return Err(Error::IndexOutOfRange { index: k, i, j, n });
        }
        let w = v[i - 1] * v[j - 1] * b * (theta_star[i - 1] - theta_star[j - 1]).cos();
        weights.push(w);
        if w == 0.0 {
            dropped.push(k);
        } else {
            edges.push((i, j, w));
        }
    }
    let graph = SignedGraph::build(n, &edges)?;
    let eig = numerics::eigh(&graph.laplacian())?;
    let class = tol.classify(&eig.eigenvalues, graph.connected_components().count);
    let stable = class.inertia == Inertia::new(0, 1, n.saturating_sub(1));
    Ok(EquilibriumScreen {
        weights,
        graph,
        stable,
        type_index: class.inertia.minus,
        marginal: class.marginal,
        dropped,
    })
}
