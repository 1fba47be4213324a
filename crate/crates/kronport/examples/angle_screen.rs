//! Screens a small-signal power-network equilibrium. Linearizing the AC
//! power-flow equations around operating angles theta* gives a Laplacian
//! whose weights are v_i v_j b_ij cos(theta*_i - theta*_j); a line can
//! contribute a negative weight either through series capacitance (b < 0)
//! or through an angle difference beyond 90 degrees. The screen classifies
//! the equilibrium by the inertia of that Laplacian.
//!
//! Run with: cargo run --example angle_screen

use kronport::dynamics;
use kronport::numerics::TolerancePolicy;

fn main() -> Result<(), kronport::Error> {
    let tol = TolerancePolicy::default();

    // A four-bus ring with one series-capacitive line (negative
    // susceptance) between buses 1 and 3.
    let lines = [
        (1usize, 2usize, 10.0),
        (2, 3, 8.0),
        (3, 4, 12.0),
        (1, 4, 9.0),
        (1, 3, -2.5),
    ];
    let v = [1.02, 0.99, 1.01, 1.0];

    // Flat start: all angles equal. cos of every difference is 1, so the
    // weights are just v_i v_j b_ij.
    let flat = [0.0; 4];
    let screen = dynamics::angle_stability_weights(&lines, &v, &flat, &tol)?;
    println!("flat start:");
    for (k, w) in screen.weights.iter().enumerate() {
        println!("  line {:?} -> weight {w:+.4}", (lines[k].0, lines[k].1));
    }
    println!(
        "  stable: {} (type index {})",
        screen.stable, screen.type_index
    );
    println!();

    // A stressed operating point: bus 3 pulled far ahead. The (2,3) line
    // sees an angle difference past 90 degrees and its weight goes
    // negative even though the line itself is inductive.
    let stressed = [0.0, -0.3, 1.75, 0.1];
    let screen = dynamics::angle_stability_weights(&lines, &v, &stressed, &tol)?;
    println!("stressed operating point (theta = {stressed:?}):");
    for (k, w) in screen.weights.iter().enumerate() {
        println!("  line {:?} -> weight {w:+.4}", (lines[k].0, lines[k].1));
    }
    println!(
        "  stable: {} (type index {})",
        screen.stable, screen.type_index
    );
    let inertia = kronport::numerics::inertia(&screen.graph.laplacian(), &tol)?;
    println!("  laplacian inertia: {inertia}");
    Ok(())
}
