//! Integrates the diffusion x' = -L x on the nine-node network. Because the
//! Laplacian is PSD with a simple kernel, every agent converges to the
//! average of the initial values even though two couplings are repulsive.
//! Along the way one agent is briefly pushed below zero; the orthant scan
//! localizes that excursion.
//!
//! Run with: cargo run --example consensus

use std::path::Path;

use kronport::dynamics;
use kronport::io;
use kronport::numerics::TolerancePolicy;

fn main() -> Result<(), kronport::Error> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
    let graph = io::read_graph(Path::new(&format!("{dir}/nine_node.txt")))?;
    let x0 = io::read_vector(Path::new(&format!("{dir}/nine_node_x0.txt")))?;
    let tol = TolerancePolicy::default();

    let times: Vec<f64> = (0..=200).map(|k| 20.0 * k as f64 / 200.0).collect();
    let traj = dynamics::simulate_consensus(&graph, &x0, &times, &tol)?;

    println!("verdict: {:?}", traj.verdict);
    let target = traj.consensus_value.expect("PSD network reaches consensus");
    println!("consensus value (average of x0): {target:.12}");
    println!();

    println!("{:>6}  {:>9} {:>9} {:>9} {:>9}", "t", "x1", "x5", "x6", "x9");
    for &t in &[0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0] {
        let x = traj.state_at(t);
        println!(
            "{t:>6.2}  {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            x[0], x[4], x[5], x[8]
        );
    }
    println!();

    let spread = |x: &[f64]| {
        x.iter()
            .fold(0.0f64, |m, v| m.max((v - target).abs()))
    };
    println!("max deviation from the average at t = 20: {:.3e}", spread(&traj.state_at(20.0)));
    println!();

    // All initial values are nonnegative, yet the repulsive edges push one
    // agent negative for a short window. exp(-Lt) is only eventually
    // positive, not positive for all t.
    let events = dynamics::orthant_exit_events(&traj, &tol)?;
    if events.is_empty() {
        println!("no agent ever left the nonnegative orthant");
    }
    for e in &events {
        println!(
            "agent {} leaves the orthant on t in [{:.4}, {:.4}], bottoming out at {:.6} (t = {:.4})",
            e.agent,
            e.exit_time,
            e.return_time.unwrap_or(f64::INFINITY),
            e.min_value,
            e.min_time
        );
    }
    Ok(())
}
