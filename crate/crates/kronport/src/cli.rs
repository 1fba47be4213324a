//! Batch command-line front-end: parse a graph file, run the requested
//! analysis, print a versioned JSON report to stdout, and write CSV
//! artifacts either to `--out` or to stdout for the tabular commands.
//!
//! Exit codes: 0 success, 2 usage or input errors, 3 route disagreement,
//! 4 negative verdict or infeasible case under `--strict`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{self, Certificate, CertifyRoute, GridAxis, RegionGrid, TimeGrid};
use crate::dynamics;
use crate::graph::SignedGraph;
use crate::io;
use crate::numerics::{self, Inertia, TolerancePolicy};
use crate::reduction;
use crate::{Error, Result};

fn positive_float(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a positive finite number".to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kronport",
    version,
    about = "Signed-Laplacian certification, reduction, and network analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Relative spectral zero tolerance.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_float)]
    rel_zero: f64,
    /// Absolute floor under the zero tolerance.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = positive_float)]
    abs_floor: f64,
    /// Exit with code 4 when the verdict is negative or the case infeasible.
    #[arg(long, global = true)]
    strict: bool,
    /// Echoed into the report; every command is deterministic for a fixed
    /// seed and identical inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the command's file artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify that the Laplacian is PSD with a simple zero eigenvalue.
    Certify {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
    },
    /// Compute the full inertia, with topological bounds always included.
    Inertia {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = InertiaRouteArg::All)]
        route: InertiaRouteArg,
    },
    /// Reduce onto a terminal set and emit the reduced edge list.
    Kron {
        graph: PathBuf,
        /// Comma-separated 1-based terminal nodes; defaults to the endpoints
        /// of the negative edges.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<usize>>,
    },
    /// Raster the admissible set of the two negative weights as CSV.
    Region {
        graph: PathBuf,
        /// Axis for the first negative weight, `min:max:count`.
        #[arg(long, default_value = "-20:-0.1:50", allow_hyphen_values = true)]
        a1: String,
        /// Axis for the second negative weight, `min:max:count`.
        #[arg(long, default_value = "-20:-0.1:50", allow_hyphen_values = true)]
        a2: String,
        /// Re-check every sample against the direct spectral verdict.
        #[arg(long)]
        verify: bool,
    },
    /// Sample x(t) = exp(-Lt) x0 and scan for orthant exits.
    Simulate {
        graph: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 10.0, value_parser = positive_float)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Solve the DC power-flow equations p = L theta.
    Dcflow {
        graph: PathBuf,
        injections: PathBuf,
    },
    /// Report eventual positivity of exp(-Lt) and the shifted power test.
    Eventual {
        graph: PathBuf,
        /// Cap for the power-positivity search; defaults to 64 n.
        #[arg(long)]
        k_max: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Kron,
    Multiport,
    Split,
    Cyclefree,
    Sequential,
    Oracle,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InertiaRouteArg {
    Kron,
    Conductance,
    Oracle,
    All,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct ToleranceEcho {
    rel_zero: f64,
    abs_floor: f64,
}

#[derive(Serialize)]
struct RunReport {
    schema: u32,
    command: &'static str,
    argv: Vec<String>,
    inputs: Vec<InputDigest>,
    tolerance: ToleranceEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    warnings: Vec<String>,
    results: Value,
}

fn report(
    cli: &Cli,
    command: &'static str,
    inputs: Vec<InputDigest>,
    warnings: Vec<String>,
    results: Value,
) -> RunReport {
    RunReport {
        schema: 1,
        command,
        argv: std::env::args().collect(),
        inputs,
        tolerance: ToleranceEcho {
            rel_zero: cli.rel_zero,
            abs_floor: cli.abs_floor,
        },
        seed: cli.seed,
        warnings,
        results,
    }
}

fn print_report(r: &RunReport) {
    println!(
        "{}",
        serde_json::to_string_pretty(r).expect("report serializes")
    );
}

fn load_graph(path: &Path) -> Result<(SignedGraph, InputDigest)> {
    let text = fs::read_to_string(path)?;
    let g = io::parse_graph(&text, &path.display().to_string())?;
    Ok((
        g,
        InputDigest {
            path: path.display().to_string(),
            sha256: io::sha256_hex(text.as_bytes()),
        },
    ))
}

fn load_vector(path: &Path) -> Result<(Vec<f64>, InputDigest)> {
    let text = fs::read_to_string(path)?;
    let v = io::parse_vector(&text, &path.display().to_string())?;
    Ok((
        v,
        InputDigest {
            path: path.display().to_string(),
            sha256: io::sha256_hex(text.as_bytes()),
        },
    ))
}

/// Parses an axis spec of the form `min:max:count`.
fn parse_axis(spec: &str) -> Result<GridAxis> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidGrid {
            reason: format!("axis must be `min:max:count`, got `{spec}`"),
        });
    }
    let min: f64 = parts[0].parse().map_err(|_| Error::InvalidGrid {
        reason: format!("bad axis minimum `{}`", parts[0]),
    })?;
    let max: f64 = parts[1].parse().map_err(|_| Error::InvalidGrid {
        reason: format!("bad axis maximum `{}`", parts[1]),
    })?;
    let count: usize = parts[2].parse().map_err(|_| Error::InvalidGrid {
        reason: format!("bad axis count `{}`", parts[2]),
    })?;
    GridAxis::new(min, max, count)
}

/// Entry point for the binary: parses arguments, runs the command, and maps
/// errors to the documented exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::RouteDisagreement { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let tol = TolerancePolicy::new(cli.rel_zero, cli.abs_floor);
    match &cli.command {
        Command::Certify { graph, route } => cmd_certify(cli, &tol, graph, *route),
        Command::Inertia { graph, route } => cmd_inertia(cli, &tol, graph, *route),
        Command::Kron { graph, alpha } => cmd_kron(cli, &tol, graph, alpha.as_deref()),
        Command::Region {
            graph,
            a1,
            a2,
            verify,
        } => cmd_region(cli, &tol, graph, a1, a2, *verify),
        Command::Simulate {
            graph,
            state,
            t_max,
            steps,
        } => cmd_simulate(cli, &tol, graph, state, *t_max, *steps),
        Command::Dcflow { graph, injections } => cmd_dcflow(cli, &tol, graph, injections),
        Command::Eventual { graph, k_max } => cmd_eventual(cli, &tol, graph, *k_max),
    }
}

fn single_route(arg: RouteArg) -> Option<CertifyRoute> {
    match arg {
        RouteArg::Kron => Some(CertifyRoute::Kron),
        RouteArg::Multiport => Some(CertifyRoute::Multiport),
        RouteArg::Split => Some(CertifyRoute::Split),
        RouteArg::Cyclefree => Some(CertifyRoute::CycleFree),
        RouteArg::Sequential => Some(CertifyRoute::Sequential),
        RouteArg::Oracle => Some(CertifyRoute::Oracle),
        RouteArg::All => None,
    }
}

fn cmd_certify(cli: &Cli, tol: &TolerancePolicy, path: &Path, route: RouteArg) -> Result<i32> {
    let (g, digest) = load_graph(path)?;
    let mut warnings = Vec::new();
    let mut certs: Vec<Certificate> = Vec::new();
    let mut abstained: Vec<Value> = Vec::new();

    match single_route(route) {
        Some(r) => {
            let cert = analysis::certify(&g, r, tol)?;
            if r == CertifyRoute::CycleFree && cert.route != analysis::Route::CycleFree {
                warnings.push(
                    "cycle-free bound not applicable to this graph; fell back to the split test"
                        .to_string(),
                );
            }
            certs.push(cert);
        }
        None => {
            for r in [
                CertifyRoute::Oracle,
                CertifyRoute::Kron,
                CertifyRoute::Multiport,
                CertifyRoute::Split,
            ] {
                certs.push(analysis::certify(&g, r, tol)?);
            }
            match analysis::certify_psd_cycle_free(&g, tol) {
                Ok(c) => certs.push(c),
                Err(Error::NotApplicable { reason }) => {
                    warnings.push(format!("cycle-free route abstained: {reason}"));
                    abstained.push(json!({"route": "CYCLE_FREE", "reason": reason}));
                }
                Err(e) => return Err(e),
            }
            match analysis::certify_psd_sequential(&g, tol) {
                Ok(c) => certs.push(c),
                Err(Error::PositivePartDisconnected { components }) => {
                    let reason =
                        format!("positive part splits into {components} components");
                    warnings.push(format!("sequential route abstained: {reason}"));
                    abstained.push(json!({"route": "SEQUENTIAL", "reason": reason}));
                }
                Err(e) => return Err(e),
            }
        }
    }

    for c in &certs {
        if c.marginal {
            warnings.push(format!(
                "route {:?}: verdict is marginal, an eigenvalue sits within the tolerance band",
                c.route
            ));
        }
    }

    let decisive: Vec<&Certificate> = certs.iter().filter(|c| !c.marginal).collect();
    let mut disagreement = None;
    if let Some(first) = decisive.first() {
        for c in &decisive[1..] {
            if c.verdict != first.verdict {
                disagreement = Some(format!(
                    "route {:?} says {:?} but route {:?} says {:?}",
                    first.route, first.verdict, c.route, c.verdict
                ));
                break;
            }
        }
    }

    let verdict = certs.first().map(|c| c.verdict);
    let negative = certs.first().is_some_and(|c| !c.is_psd_corank1());
    let results = json!({
        "verdict": verdict,
        "agreement": disagreement.is_none(),
        "certificates": certs,
        "abstained": abstained,
    });
    print_report(&report(cli, "certify", vec![digest], warnings, results));
    if let Some(detail) = disagreement {
        return Err(Error::RouteDisagreement { detail });
    }
    if cli.strict && negative {
        return Ok(4);
    }
    Ok(0)
}

fn cmd_inertia(
    cli: &Cli,
    tol: &TolerancePolicy,
    path: &Path,
    route: InertiaRouteArg,
) -> Result<i32> {
    let (g, digest) = load_graph(path)?;
    let mut warnings = Vec::new();
    let bounds = analysis::inertia_bounds(&g);
    let eig = numerics::eigh(&g.laplacian())?;
    let marginal = tol
        .classify(&eig.eigenvalues, g.connected_components().count)
        .marginal;
    if marginal {
        warnings.push(
            "spectrum is marginal: an eigenvalue sits within the tolerance band".to_string(),
        );
    }

    let requested: Vec<InertiaRouteArg> = match route {
        InertiaRouteArg::All => vec![
            InertiaRouteArg::Oracle,
            InertiaRouteArg::Kron,
            InertiaRouteArg::Conductance,
        ],
        single => vec![single],
    };
    let mut entries: Vec<Value> = Vec::new();
    let mut values: Vec<Inertia> = Vec::new();
    for r in requested {
        let (name, outcome) = match r {
            InertiaRouteArg::Oracle => ("oracle", numerics::inertia(&g.laplacian(), tol)),
            InertiaRouteArg::Kron => ("kron", analysis::inertia_via_kron(&g, tol)),
            InertiaRouteArg::Conductance => {
                ("conductance", analysis::inertia_via_conductance(&g, tol))
            }
            InertiaRouteArg::All => unreachable!("expanded above"),
        };
        match outcome {
            Ok(v) => {
                entries.push(json!({"route": name, "inertia": v}));
                values.push(v);
            }
            Err(e) if route == InertiaRouteArg::All => {
                warnings.push(format!("route {name} unavailable: {e}"));
                entries.push(json!({"route": name, "error": e.to_string()}));
            }
            Err(e) => return Err(e),
        }
    }

    let mut disagreement = None;
    if !marginal {
        if let Some(first) = values.first() {
            if let Some(other) = values.iter().find(|v| *v != first) {
                disagreement = Some(format!("computed inertias differ: {first} vs {other}"));
            }
        }
    }
    let contained = values.iter().all(|v| bounds.contains(v));
    let results = json!({
        "inertia": entries,
        "bounds": bounds,
        "bounds_contain": contained,
    });
    print_report(&report(cli, "inertia", vec![digest], warnings, results));
    if let Some(detail) = disagreement {
        return Err(Error::RouteDisagreement { detail });
    }
    Ok(0)
}

fn cmd_kron(
    cli: &Cli,
    tol: &TolerancePolicy,
    path: &Path,
    alpha: Option<&[usize]>,
) -> Result<i32> {
    let (g, digest) = load_graph(path)?;
    let mut warnings = Vec::new();
    let alpha_vec = match alpha {
        Some(a) => a.to_vec(),
        None => reduction::external_terminals(&g)?,
    };
    let result = reduction::kron_reduce(&g.laplacian(), &alpha_vec, tol)?;
    if result.disconnected_input {
        warnings.push("input graph is disconnected; the reduction acts blockwise".to_string());
    }
    let block = reduction::eliminated_block_inertia(&g.laplacian(), &result, tol)?;

    let mut edge_list = String::from(
        "# reduced network; node labels map back to the input as listed below\n",
    );
    for (k, &orig) in result.alpha.iter().enumerate() {
        edge_list.push_str(&format!("# node {} = input node {}\n", k + 1, orig));
    }
    edge_list.push_str(&io::format_graph(&result.reduced_graph));
    if let Some(out) = &cli.out {
        fs::write(out, &edge_list)?;
    }

    let results = json!({
        "alpha": result.alpha,
        "beta": result.beta,
        "reduced_graph": result.reduced_graph,
        "reduced_laplacian": result.l_r,
        "eliminated_block_inertia": block,
        "disconnected_input": result.disconnected_input,
        "edge_list": edge_list,
    });
    print_report(&report(cli, "kron", vec![digest], warnings, results));
    Ok(0)
}

fn cmd_region(
    cli: &Cli,
    tol: &TolerancePolicy,
    path: &Path,
    a1: &str,
    a2: &str,
    verify: bool,
) -> Result<i32> {
    let (g, digest) = load_graph(path)?;
    let grid = RegionGrid {
        a1: parse_axis(a1)?,
        a2: parse_axis(a2)?,
    };
    let region = analysis::negative_weight_region(&g, &grid, tol)?;

    let mut verified = 0usize;
    if verify {
        let [k1, k2] = region.negative_edge_indices;
        for s in &region.samples {
            let instance = g.with_weight(k1, s.a1)?.with_weight(k2, s.a2)?;
            let cert = analysis::certify_psd_oracle(&instance, tol)?;
            if cert.marginal {
                continue;
            }
            verified += 1;
            if cert.is_psd_corank1() != s.admissible {
                return Err(Error::RouteDisagreement {
                    detail: format!(
                        "region flag at ({}, {}) contradicts the direct spectral verdict",
                        s.a1, s.a2
                    ),
                });
            }
        }
    }

    let csv = io::region_csv(&region);
    match &cli.out {
        Some(out) => {
            fs::write(out, &csv)?;
            let admissible = region.samples.iter().filter(|s| s.admissible).count();
            let results = json!({
                "ports": region.ports,
                "negative_edge_indices": region.negative_edge_indices,
                "boundary": region.boundary,
                "samples": region.samples.len(),
                "admissible": admissible,
                "verified_samples": if verify { Some(verified) } else { None },
                "csv": out.display().to_string(),
            });
            print_report(&report(cli, "region", vec![digest], Vec::new(), results));
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_simulate(
    cli: &Cli,
    tol: &TolerancePolicy,
    graph_path: &Path,
    state_path: &Path,
    t_max: f64,
    steps: usize,
) -> Result<i32> {
    let (g, gd) = load_graph(graph_path)?;
    let (x0, xd) = load_vector(state_path)?;
    if steps < 2 {
        return Err(Error::InvalidTimeGrid {
            reason: format!("need at least two samples, got {steps}"),
        });
    }
    let times: Vec<f64> = (0..steps)
        .map(|k| t_max * k as f64 / (steps - 1) as f64)
        .collect();
    let traj = dynamics::simulate_consensus(&g, &x0, &times, tol)?;

    let mut warnings = Vec::new();
    if traj.marginal {
        warnings.push(
            "verdict is marginal: an eigenvalue sits within the tolerance band".to_string(),
        );
    }
    let events = match dynamics::orthant_exit_events(&traj, tol) {
        Ok(ev) => ev,
        Err(Error::NegativeInitialCondition { index, value }) => {
            warnings.push(format!(
                "initial state has a negative entry (agent {index} = {value}); orthant scan skipped"
            ));
            Vec::new()
        }
        Err(e) => return Err(e),
    };

    let csv = io::trajectory_csv(&traj);
    let negative = traj.verdict == analysis::Verdict::NotPsdCorank1;
    match &cli.out {
        Some(out) => {
            fs::write(out, &csv)?;
            let results = json!({
                "verdict": traj.verdict,
                "consensus_value": traj.consensus_value,
                "events": events,
                "samples": traj.times.len(),
                "agents": g.node_count(),
                "csv": out.display().to_string(),
            });
            print_report(&report(cli, "simulate", vec![gd, xd], warnings, results));
        }
        None => print!("{csv}"),
    }
    if cli.strict && negative {
        return Ok(4);
    }
    Ok(0)
}

fn cmd_dcflow(
    cli: &Cli,
    tol: &TolerancePolicy,
    graph_path: &Path,
    injection_path: &Path,
) -> Result<i32> {
    let (g, gd) = load_graph(graph_path)?;
    let (p, pd) = load_vector(injection_path)?;
    let case = dynamics::dc_power_flow(&g, &p, tol)?;
    let mut warnings = Vec::new();
    if case.marginal {
        warnings.push(
            "spectrum is marginal: an eigenvalue sits within the tolerance band".to_string(),
        );
    }
    let feasible = case.feasible;
    let results = serde_json::to_value(&case).expect("case serializes");
    print_report(&report(cli, "dcflow", vec![gd, pd], warnings, results));
    if cli.strict && !feasible {
        return Ok(4);
    }
    Ok(0)
}

fn cmd_eventual(
    cli: &Cli,
    tol: &TolerancePolicy,
    path: &Path,
    k_max: Option<usize>,
) -> Result<i32> {
    let (g, digest) = load_graph(path)?;
    let k_max = k_max.unwrap_or_else(|| analysis::default_power_bound(g.node_count()));
    let rep = analysis::eventual_positivity(&g, tol, k_max, &TimeGrid::default())?;
    let oracle = analysis::certify_psd_oracle(&g, tol)?;
    let mut warnings = Vec::new();
    if rep.marginal {
        warnings.push(
            "spectrum is marginal: an eigenvalue sits within the tolerance band".to_string(),
        );
    }
    let consistent = rep.marginal || rep.is_eep == oracle.is_psd_corank1();
    let is_eep = rep.is_eep;
    let results = json!({
        "report": rep,
        "oracle_verdict": oracle.verdict,
    });
    print_report(&report(cli, "eventual", vec![digest], warnings, results));
    if !consistent {
        return Err(Error::RouteDisagreement {
            detail: "eventual-positivity flag contradicts the direct spectral verdict"
                .to_string(),
        });
    }
    if cli.strict && !is_eep {
        return Ok(4);
    }
    Ok(0)
}
