//! Immutable signed-graph model: validated weighted edge lists, Laplacian and
//! incidence assembly, sign splitting, connectivity, and spanning forests.
//!
//! Node labels are 1-based at this API (matching the file formats); matrix
//! rows and columns are 0-based. Edges are stored with `i < j` in their input
//! order, which fixes the edge indices `0..m` used everywhere else.
//!
//! Assembly discipline: diagonals accumulate incident weights in edge-index
//! order. Row sums of the Laplacian are then exactly zero when evaluated
//! off-diagonals-first in that same order, which is what the row-sum tests do.

use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::HashSet;

use crate::numerics::SymmetricMatrix;
use crate::{Error, Result};

/// Undirected weighted edge with 1-based endpoints, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// A signed graph: `n` nodes labeled 1..=n and an ordered list of edges with
/// nonzero weights of either sign, at most one edge per unordered pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
}

/// Incidence factorization L = D W D'. Each column of `d` has one +1 (at the
/// smaller endpoint) and one -1; `weights` is the diagonal of W in edge order.
#[derive(Clone, Debug)]
pub struct IncidenceFactorization {
    pub d: DMatrix<f64>,
    pub weights: Vec<f64>,
}

/// Sign split of a graph: the positive part and the negative part are both
/// spanning subgraphs on the parent's node set, so component counts include
/// isolated nodes. The index maps point each part edge back to its parent
/// edge index.
#[derive(Clone, Debug)]
pub struct SignSplit {
    pub positive: SignedGraph,
    pub negative: SignedGraph,
    pub positive_edge_indices: Vec<usize>,
    pub negative_edge_indices: Vec<usize>,
}

/// Connected-component labeling. Labels are 0-based component ids assigned in
/// ascending order of each component's smallest node.
#[derive(Clone, Debug, PartialEq)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

/// Edge indices (into the graph the forest was computed from) of a maximal
/// acyclic subgraph, chosen greedily by ascending edge index.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningForest {
    pub edge_indices: Vec<usize>,
    pub m_f: usize,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl SignedGraph {
    /// Validates and builds a graph. Edge order is preserved and defines the
    /// edge indices; endpoints are normalized to `i < j`.
    pub fn build(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (index, &(i, j, weight)) in edges.iter().enumerate() {
            if i == j {
                return Err(Error::SelfLoop { index, i });
            }
            if i < 1 || i > n || j < 1 || j > n {
                return Err(Error::IndexOutOfRange { index, i, j, n });
            }
            if weight == 0.0 || !weight.is_finite() {
                return Err(Error::ZeroWeight { index, i, j });
            }
            let (a, b) = (i.min(j), i.max(j));
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge { index, i, j });
            }
            out.push(Edge {
                i: a,
                j: b,
                weight,
            });
        }
        Ok(SignedGraph { n, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices of edges with negative weight, in edge order.
    pub fn negative_edge_indices(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight < 0.0)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn has_negative_edge(&self) -> bool {
        self.edges.iter().any(|e| e.weight < 0.0)
    }

    /// Copy with one edge's weight replaced (used to instantiate templates).
    pub fn with_weight(&self, edge_index: usize, weight: f64) -> Result<Self> {
        let mut g = self.clone();
        let e = g.edges.get_mut(edge_index).ok_or(Error::EdgeIndexOutOfRange {
            index: edge_index,
            count: self.edges.len(),
        })?;
        if weight == 0.0 || !weight.is_finite() {
            return Err(Error::ZeroWeight {
                index: edge_index,
                i: e.i,
                j: e.j,
            });
        }
        e.weight = weight;
        Ok(g)
    }

    /// Subgraph on the same node set keeping the listed edges (parent order).
    pub fn edge_subgraph(&self, edge_indices: &[usize]) -> Self {
        SignedGraph {
            n: self.n,
            edges: edge_indices.iter().map(|&k| self.edges[k]).collect(),
        }
    }

    /// Signed Laplacian: off-diagonal -a_ij, diagonal the sum of incident
    /// weights accumulated in edge-index order.
    pub fn laplacian(&self) -> SymmetricMatrix {
        let mut l = SymmetricMatrix::zeros(self.n);
        for e in &self.edges {
            let (i, j) = (e.i - 1, e.j - 1);
            l.set(i, j, -e.weight);
            l.add_assign_at(i, i, e.weight);
            l.add_assign_at(j, j, e.weight);
        }
        l
    }

    /// Opposing (loopy) Laplacian: same off-diagonals, diagonal the sum of
    /// absolute incident weights. Equals L plus a nonnegative diagonal.
    pub fn opposing_laplacian(&self) -> SymmetricMatrix {
        let mut l = SymmetricMatrix::zeros(self.n);
        for e in &self.edges {
            let (i, j) = (e.i - 1, e.j - 1);
            l.set(i, j, -e.weight);
            l.add_assign_at(i, i, e.weight.abs());
            l.add_assign_at(j, j, e.weight.abs());
        }
        l
    }

    /// Incidence factorization with the deterministic orientation head =
    /// smaller node index. D W D' reassembles the Laplacian bitwise (the
    /// Laplacian is orientation-independent, so any column sign flip leaves
    /// the product unchanged).
    pub fn incidence(&self) -> IncidenceFactorization {
        let m = self.edges.len();
        let mut d = DMatrix::zeros(self.n, m);
        let mut weights = Vec::with_capacity(m);
        for (k, e) in self.edges.iter().enumerate() {
            d[(e.i - 1, k)] = 1.0;
            d[(e.j - 1, k)] = -1.0;
            weights.push(e.weight);
        }
        IncidenceFactorization { d, weights }
    }

    /// Partitions edges by weight sign into two spanning subgraphs.
    pub fn split_by_sign(&self) -> SignSplit {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut pidx = Vec::new();
        let mut nidx = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.weight > 0.0 {
                positive.push(*e);
                pidx.push(k);
            } else {
                negative.push(*e);
                nidx.push(k);
            }
        }
        SignSplit {
            positive: SignedGraph {
                n: self.n,
                edges: positive,
            },
            negative: SignedGraph {
                n: self.n,
                edges: negative,
            },
            positive_edge_indices: pidx,
            negative_edge_indices: nidx,
        }
    }

    pub fn connected_components(&self) -> Components {
        let mut adjacency = vec![Vec::new(); self.n];
        for e in &self.edges {
            adjacency[e.i - 1].push(e.j - 1);
            adjacency[e.j - 1].push(e.i - 1);
        }
        let mut labels = vec![usize::MAX; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if labels[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            labels[start] = count;
            while let Some(v) = stack.pop() {
                for &w in &adjacency[v] {
                    if labels[w] == usize::MAX {
                        labels[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        Components { count, labels }
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().count == 1
    }

    /// Greedy spanning forest over ascending edge indices: an edge joins the
    /// forest exactly when it links two so-far-separate components.
    pub fn spanning_forest(&self) -> SpanningForest {
        let mut uf = UnionFind::new(self.n);
        let mut edge_indices = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if uf.union(e.i - 1, e.j - 1) {
                edge_indices.push(k);
            }
        }
        let m_f = edge_indices.len();
        SpanningForest { edge_indices, m_f }
    }
}

impl IncidenceFactorization {
    /// Reassembles D W D' by decoding each column's endpoints and accumulating
    /// exactly like the direct Laplacian assembly, so the comparison against
    /// `laplacian()` is bitwise. Column sign flips decode to the same pair.
    pub fn reassemble(&self) -> SymmetricMatrix {
        let n = self.d.nrows();
        let mut l = SymmetricMatrix::zeros(n);
        for (k, &w) in self.weights.iter().enumerate() {
            let mut head = None;
            let mut tail = None;
            for r in 0..n {
                let v = self.d[(r, k)];
                if v == 1.0 {
                    head = Some(r);
                } else if v == -1.0 {
                    tail = Some(r);
                }
            }
            let (h, t) = (head.expect("column lacks +1"), tail.expect("column lacks -1"));
            l.set(h, t, -w);
            l.add_assign_at(h, h, w);
            l.add_assign_at(t, t, w);
        }
        l
    }
}
