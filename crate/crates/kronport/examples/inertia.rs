//! Computes the Laplacian inertia of the nine-node network three ways
//! (dense eigendecomposition, reduction onto the negative-edge endpoints,
//! and the negative-forest conductance matrix) and checks them against the
//! purely topological bounds. Then it strengthens the two negative weights
//! step by step to show the positive semidefiniteness margin being eaten up.
//!
//! Run with: cargo run --example inertia

use std::path::Path;

use kronport::analysis;
use kronport::io;
use kronport::numerics::{self, TolerancePolicy};

fn main() -> Result<(), kronport::Error> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_node.txt");
    let graph = io::read_graph(Path::new(path))?;
    let tol = TolerancePolicy::default();

    let oracle = numerics::inertia(&graph.laplacian(), &tol)?;
    let via_kron = analysis::inertia_via_kron(&graph, &tol)?;
    let via_y = analysis::inertia_via_conductance(&graph, &tol)?;
    println!("inertia (minus, zero, plus)");
    println!("  dense eigenvalues : {oracle}");
    println!("  via reduction     : {via_kron}");
    println!("  via conductance   : {via_y}");

    let bounds = analysis::inertia_bounds(&graph);
    println!(
        "bounds from counting components: minus in {:?}, zero in {:?}, plus in {:?}",
        bounds.minus, bounds.zero, bounds.plus
    );
    assert!(bounds.contains(&oracle));
    println!();

    // The nine-node network carries negative weights (-3, -4) and is PSD
    // with a simple kernel. Stronger repulsion flips eigenvalues negative
    // one at a time.
    let [k1, k2] = [15, 16];
    for (a1, a2) in [(-3.0, -4.0), (-3.0, -7.0), (-40.0, -30.0)] {
        let g = graph.with_weight(k1, a1)?.with_weight(k2, a2)?;
        let inertia = numerics::inertia(&g.laplacian(), &tol)?;
        let agree = analysis::inertia_via_conductance(&g, &tol)?;
        assert_eq!(inertia, agree);
        println!("weights ({a1:>5}, {a2:>5}) -> inertia {inertia}");
    }
    Ok(())
}
