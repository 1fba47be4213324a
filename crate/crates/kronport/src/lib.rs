//! Spectral certification of signed-graph Laplacians through their electrical
//! interpretation.
//!
//! A signed graph carries real nonzero edge weights of either sign. Its
//! Laplacian `L` is symmetric with zero row sums but, unlike the classical
//! case, need not be positive semidefinite. This crate decides whether `L` is
//! PSD with a simple zero eigenvalue (the property that makes consensus,
//! DC power flow, and small-signal angle stability behave), computes the full
//! inertia, and tests eventual positivity of `-L`, using several independent
//! routes that the library cross-checks against a dense eigendecomposition
//! oracle:
//!
//! * Kron reduction onto the nodes touching negative edges ([`reduction`]),
//! * port resistance/conductance matrices of the associated resistive
//!   multiport network ([`multiport`]),
//! * the positive/negative split with parallel-connection algebra,
//! * a per-edge effective-resistance bound for graphs whose cycles contain at
//!   most one negative edge,
//! * sequential re-insertion of negative edges.
//!
//! Each capability has a runnable demonstration under `examples/`:
//!
//! ```text
//! cargo run --example certify              every certification route vs. the oracle
//! cargo run --example inertia              inertia via reduction, conductance, bounds
//! cargo run --example kron_reduce          interior-node elimination on the bundled network
//! cargo run --example effective_resistance port matrices, open/short/parallel algebra
//! cargo run --example admissible_region    negative-weight admissibility raster
//! cargo run --example consensus            trajectory with orthant-exit detection
//! cargo run --example dc_power_flow        feasibility screening of injection cases
//! cargo run --example eventual_positivity  shifted power / matrix-exponential positivity
//! cargo run --example angle_screen         equilibrium screening for line networks
//! ```
//!
//! The `kronport` binary exposes the same analyses over edge-list files; see
//! the README for the file formats and JSON report schema.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod graph;
pub mod io;
pub mod multiport;
pub mod numerics;
pub mod reduction;

/// Crate-wide error type. Variants name the offending object so callers can
/// report failures without re-deriving context.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge {index}: duplicate unordered pair ({i}, {j})")]
    DuplicateEdge { index: usize, i: usize, j: usize },
    #[error("edge {index}: self-loop at node {i}")]
    SelfLoop { index: usize, i: usize },
    #[error("edge {index}: zero weight on ({i}, {j})")]
    ZeroWeight { index: usize, i: usize, j: usize },
    #[error("edge {index}: endpoint ({i}, {j}) outside 1..={n}")]
    IndexOutOfRange {
        index: usize,
        i: usize,
        j: usize,
        n: usize,
    },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("block selection must be a nonempty proper subset of the index range")]
    EmptyBlock,
    #[error("graph has no negative edges")]
    NoNegativeEdges,
    #[error("negative part has no edges; treat the graph by the all-positive path")]
    EmptyForest,
    #[error("opening every port leaves no network")]
    AllPortsOpened,
    #[error("shorting every port leaves no network")]
    AllPortsShorted,
    #[error("port index {index} outside 0..{count}")]
    PortIndexOutOfRange { index: usize, count: usize },
    #[error("edge index {index} outside 0..{count}")]
    EdgeIndexOutOfRange { index: usize, count: usize },
    #[error("port {index}: duplicate unordered terminal pair ({s}, {t})")]
    DuplicatePort { index: usize, s: usize, t: usize },
    #[error("port {index}: terminals coincide at node {s}")]
    PortSelfPair { index: usize, s: usize },
    #[error("port {index}: terminal pair ({s}, {t}) outside 1..={n}")]
    PortNodeOutOfRange {
        index: usize,
        s: usize,
        t: usize,
        n: usize,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("external terminal set needs at least 2 nodes, got {got}")]
    AlphaTooSmall { got: usize },
    #[error("external terminal set must be a proper subset of the nodes")]
    AlphaNotProper,
    #[error("cycle-free bound not applicable: {reason}")]
    NotApplicable { reason: String },
    #[error("positive part is disconnected ({components} components)")]
    PositivePartDisconnected { components: usize },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("expected exactly {expected} negative edges, found {found}")]
    WrongNegativeEdgeCount { expected: usize, found: usize },
    #[error("initial state must be entrywise nonnegative: x0[{index}] = {value}")]
    NegativeInitialCondition { index: usize, value: f64 },
    #[error("injections must balance: |sum p| = {imbalance:.3e} exceeds {limit:.3e}")]
    UnbalancedInjections { imbalance: f64, limit: f64 },
    #[error("voltage magnitudes must be positive: V[{index}] = {value}")]
    NonpositiveVoltage { index: usize, value: f64 },
    #[error("time grid invalid: {reason}")]
    InvalidTimeGrid { reason: String },
    #[error("sampling grid invalid: {reason}")]
    InvalidGrid { reason: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("routes disagree: {detail}")]
    RouteDisagreement { detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
