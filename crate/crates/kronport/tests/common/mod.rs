//! Shared corpus generators for the integration suites. Everything is
//! seeded, so a failing case replays exactly.

use kronport::graph::SignedGraph;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One random signed graph: n in [3, 12], edge density in [0.3, 0.9],
/// negative-edge fraction in [0.1, 0.5], weight magnitudes in [0.2, 2.0].
/// Connectivity is whatever the dice produce.
pub fn random_signed_graph(rng: &mut ChaCha8Rng) -> SignedGraph {
    loop {
        let n = rng.random_range(3..=12usize);
        let density = rng.random_range(0.3..0.9);
        let neg_frac = rng.random_range(0.1..0.5);
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                if rng.random_bool(density) {
                    let mag = rng.random_range(0.2..2.0);
                    let w = if rng.random_bool(neg_frac) { -mag } else { mag };
                    edges.push((i, j, w));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        return SignedGraph::build(n, &edges).unwrap();
    }
}

/// A graph whose positive part is connected (random spanning tree plus
/// extras), with `negatives` negative edges sprinkled on unused pairs.
/// Returns the graph and the indices of the negative edges.
pub fn positive_connected_graph(
    rng: &mut ChaCha8Rng,
    negatives: usize,
) -> (SignedGraph, Vec<usize>) {
    loop {
        let n = rng.random_range(4..=12usize);
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut used = std::collections::HashSet::new();
        // random spanning tree: attach each node to an earlier one
        for j in 2..=n {
            let i = rng.random_range(1..j);
            edges.push((i, j, rng.random_range(0.2..2.0)));
            used.insert((i, j));
        }
        for i in 1..=n {
            for j in (i + 1)..=n {
                if !used.contains(&(i, j)) && rng.random_bool(0.25) {
                    edges.push((i, j, rng.random_range(0.2..2.0)));
                    used.insert((i, j));
                }
            }
        }
        let free: Vec<(usize, usize)> = (1..=n)
            .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
            .filter(|p| !used.contains(p))
            .collect();
        if free.len() < negatives {
            continue;
        }
        let mut indices = Vec::new();
        for &(i, j) in free.choose_multiple(rng, negatives) {
            indices.push(edges.len());
            edges.push((i, j, -rng.random_range(0.2..2.0)));
        }
        return (SignedGraph::build(n, &edges).unwrap(), indices);
    }
}

/// Balanced injection vector: entries in [-1, 1] shifted to sum zero, with
/// a floor on the norm so relative tolerances stay meaningful.
pub fn balanced_injections(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = p.iter().sum::<f64>() / n as f64;
        for v in p.iter_mut() {
            *v -= mean;
        }
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.1 {
            return p;
        }
    }
}
