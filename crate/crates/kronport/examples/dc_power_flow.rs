//! Solves the DC power-flow equations p = L theta on the nine-node network,
//! with the last node as the angle reference. A line with negative
//! susceptance weight models a series-capacitive branch; as long as the
//! Laplacian stays PSD with a simple kernel every balanced injection has a
//! unique solution. The example then strengthens the negative lines until
//! the system turns indefinite and shows the diagnostic.
//!
//! Run with: cargo run --example dc_power_flow

use std::path::Path;

use kronport::dynamics;
use kronport::io;
use kronport::numerics::TolerancePolicy;

fn main() -> Result<(), kronport::Error> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_node.txt");
    let graph = io::read_graph(Path::new(path))?;
    let tol = TolerancePolicy::default();

    // One unit of power injected at node 1, withdrawn at node 9.
    let mut p = vec![0.0; 9];
    p[0] = 1.0;
    p[8] = -1.0;
    let case = dynamics::dc_power_flow(&graph, &p, &tol)?;
    println!("feasible: {}", case.feasible);
    println!("residual |L theta - p|: {:.3e}", case.residual);
    println!("angles (node {} is the reference):", case.slack);
    for (k, th) in case.angles.iter().enumerate() {
        println!("  theta_{} = {th:>12.8}", k + 1);
    }
    println!();

    // Same injections on an indefinite network: the solve still produces a
    // least-squares angle vector, but the case is flagged with a reason.
    let bad = graph.with_weight(15, -40.0)?.with_weight(16, -30.0)?;
    let case = dynamics::dc_power_flow(&bad, &p, &tol)?;
    println!(
        "with weights (-40, -30): feasible = {}, reason: {}",
        case.feasible,
        case.infeasibility.as_deref().unwrap_or("none")
    );
    println!("residual there: {:.3e}", case.residual);
    Ok(())
}
