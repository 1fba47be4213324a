//! Eliminates the internal nodes of the nine-node network, keeping only the
//! three nodes touched by negative edges. The reduced three-node network is
//! electrically indistinguishable from the original at those terminals, and
//! the eliminated block is positive definite, so definiteness questions
//! transfer between the two.
//!
//! Run with: cargo run --example kron_reduce

use std::path::Path;

use kronport::graph::SignedGraph;
use kronport::io;
use kronport::numerics::{self, TolerancePolicy};
use kronport::reduction;

fn main() -> Result<(), kronport::Error> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_node.txt");
    let graph = io::read_graph(Path::new(path))?;
    let tol = TolerancePolicy::default();

    let alpha = reduction::external_terminals(&graph)?;
    println!("kept terminals (negative-edge endpoints): {alpha:?}");

    let result = reduction::kron_reduce(&graph.laplacian(), &alpha, &tol)?;
    println!("reduced network:");
    for e in result.reduced_graph.edges() {
        println!(
            "  ({}, {})  weight {:+.6}  (input nodes {} and {})",
            e.i,
            e.j,
            e.weight,
            result.alpha[e.i - 1],
            result.alpha[e.j - 1]
        );
    }

    let block = reduction::eliminated_block_inertia(&graph.laplacian(), &result, &tol)?;
    println!("eliminated block inertia: {block} (positive definite)");

    let full = numerics::inertia(&graph.laplacian(), &tol)?;
    let reduced = numerics::inertia(&result.l_r, &tol)?;
    println!("inertia transfers: full {full} = reduced {reduced} + block {block}");
    assert_eq!(full.minus, reduced.minus + block.minus);
    assert_eq!(full.zero, reduced.zero + block.zero);
    assert_eq!(full.plus, reduced.plus + block.plus);
    println!();

    // Series resistors: eliminating the middle node of a path with unit
    // conductances leaves the half-conductance of two resistors in series.
    let p3 = SignedGraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0)])?;
    let series = reduction::kron_reduce(&p3.laplacian(), &[1, 3], &tol)?;
    let e = series.reduced_graph.edges()[0];
    println!("path 1-2-3 reduced onto {{1, 3}}: weight {} (two unit resistors in series)", e.weight);
    Ok(())
}
