//! Sweeps the two negative weights of the nine-node network over a grid and
//! draws the region where the Laplacian stays PSD with a simple kernel.
//! The boundary is governed by the positive part's port impedance matrix
//! alone, so the whole raster costs one pseudoinverse plus a 2x2
//! eigenproblem per sample.
//!
//! Run with: cargo run --example admissible_region

use std::path::Path;

use kronport::analysis::{self, GridAxis, RegionGrid};
use kronport::io;
use kronport::numerics::TolerancePolicy;

fn main() -> Result<(), kronport::Error> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_node.txt");
    let graph = io::read_graph(Path::new(path))?;
    let tol = TolerancePolicy::default();

    let grid = RegionGrid {
        a1: GridAxis::new(-12.0, -0.5, 24)?,
        a2: GridAxis::new(-12.0, -0.5, 24)?,
    };
    let report = analysis::negative_weight_region(&graph, &grid, &tol)?;

    println!(
        "negative edges at ports {:?} and {:?}",
        report.ports[0], report.ports[1]
    );
    println!("boundary data (impedance matrix of the positive part):");
    for row in report.boundary.rows() {
        println!("  {row:?}");
    }
    println!();

    // Rows run over a1 from most negative (top) to least negative (bottom);
    // columns over a2 left to right. '#' marks admissible weight pairs.
    let (rows, cols) = (grid.a1.count, grid.a2.count);
    println!("admissible region ('#' = PSD with simple kernel):");
    for r in 0..rows {
        let line: String = (0..cols)
            .map(|c| {
                if report.samples[r * cols + c].admissible {
                    '#'
                } else {
                    '.'
                }
            })
            .collect();
        println!("  a1={:>6.2} |{line}|", report.samples[r * cols].a1);
    }
    println!();

    // Spot checks, including the bundled weights.
    for (a1, a2) in [(-3.0, -4.0), (-3.0, -7.0), (-11.0, -0.6)] {
        let g = graph.with_weight(15, a1)?.with_weight(16, a2)?;
        let cert = analysis::certify_psd_oracle(&g, &tol)?;
        println!("({a1:>5}, {a2:>5}) -> {:?}", cert.verdict);
    }
    Ok(())
}
