//! Treats the positive part of the nine-node network as a resistor network
//! (weight = conductance) and computes effective resistances and the
//! two-port impedance matrix across the negative-edge locations. The
//! impedance matrix is what the multiport certification route examines.
//!
//! Run with: cargo run --example effective_resistance

use std::path::Path;

use kronport::graph::SignedGraph;
use kronport::io;
use kronport::multiport::{self, PortSpec};
use kronport::numerics::{self, TolerancePolicy};

fn main() -> Result<(), kronport::Error> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_node.txt");
    let graph = io::read_graph(Path::new(path))?;
    let tol = TolerancePolicy::default();

    // Sanity checks on closed forms first. Two unit resistors in series
    // give 2, in parallel 1/2.
    let series = SignedGraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0)])?;
    println!(
        "series pair:   r(1,3) = {}",
        multiport::effective_resistance(&series.laplacian(), 1, 3, &tol)?
    );
    let parallel = SignedGraph::build(3, &[(1, 2, 2.0), (1, 3, 1.0), (2, 3, 1.0)])?;
    println!(
        "triangle:      r(1,2) = {} (direct 1/2 ohm in parallel with a 2 ohm detour)",
        multiport::effective_resistance(&parallel.laplacian(), 1, 2, &tol)?
    );
    println!();

    // The positive part of the nine-node network, probed at the two ports
    // where the negative edges attach.
    let split = graph.split_by_sign();
    let ports = PortSpec::new(graph.node_count(), &[(5, 6), (6, 7)])?;
    let lp = split.positive.laplacian();
    let li = numerics::pinv(&lp, &tol)?;
    for &(s, t) in ports.ports() {
        println!(
            "positive part: r({s},{t}) = {:.9}",
            multiport::effective_resistance_from_pinv(&li, s, t)
        );
    }
    println!(
        "transfer resistance between the ports: {:.9}",
        multiport::transfer_from_pinv(&li, (5, 6), (6, 7))
    );
    println!();

    let pair = multiport::port_matrices(&lp, &ports, &tol)?;
    let z = pair.z.expect("connected network has finite impedances");
    println!("impedance matrix Z over ports (5,6), (6,7):");
    for row in z.rows() {
        println!("  {row:?}");
    }
    println!("conductance matrix Y = Z^+:");
    for row in pair.y.rows() {
        println!("  {row:?}");
    }

    // With weights -3 and -4 the comparison -1/a against the diagonal of Z
    // leaves room, which is exactly why the network certifies as PSD.
    let (e1, e2) = (graph.edges()[15], graph.edges()[16]);
    println!();
    println!(
        "|a| r check: {:.4} * {:.6} = {:.4} and {:.4} * {:.6} = {:.4} (both < 1)",
        e1.weight.abs(),
        z.get(0, 0),
        e1.weight.abs() * z.get(0, 0),
        e2.weight.abs(),
        z.get(1, 1),
        e2.weight.abs() * z.get(1, 1),
    );
    Ok(())
}
