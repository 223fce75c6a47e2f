//! Independent maximal cliques of a thresholded correlation graph.
//!
//! A maximal clique is *independent* when it contains at least one vertex
//! that belongs to no other maximal clique. A vertex belongs to exactly one
//! maximal clique iff it is simplicial (its closed neighborhood induces a
//! clique), and that clique is its closed neighborhood. The independent
//! maximal cliques are therefore the deduplicated closed neighborhoods of
//! the simplicial vertices, which a bitset subset test finds in polynomial
//! time; no exponential enumeration path exists here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corr::EdgeSet;

/// The independent maximal cliques of a graph, in canonical order:
/// members ascending within each clique, cliques ordered by smallest member
/// (then lexicographically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSet {
    p: usize,
    cliques: Vec<Vec<usize>>,
}

impl CliqueSet {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

/// Closed neighborhoods as bitset rows; row v has bit v set.
struct ClosedNeighborhoods {
    words: usize,
    rows: Vec<u64>,
}

impl ClosedNeighborhoods {
    fn build(g: &EdgeSet) -> Self {
        let p = g.p();
        let words = p.div_ceil(64);
        let mut rows = vec![0u64; p * words];
        for v in 0..p {
            rows[v * words + v / 64] |= 1 << (v % 64);
        }
        for (a, b) in g.iter() {
            rows[a * words + b / 64] |= 1 << (b % 64);
            rows[b * words + a / 64] |= 1 << (a % 64);
        }
        Self { words, rows }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    fn is_subset(&self, a: usize, b: usize) -> bool {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .all(|(x, y)| x & !y == 0)
    }
}

/// All vertices whose closed neighborhood induces a clique.
///
/// `v` is simplicial iff `N[v] ⊆ N[u]` for every neighbor `u`, which the
/// bitset subset test checks in O(deg(v) * p / 64) per vertex.
pub fn simplicial_vertices(g: &EdgeSet) -> Vec<usize> {
    let nbh = ClosedNeighborhoods::build(g);
    let adj = g.adjacency();
    (0..g.p())
        .filter(|&v| adj[v].iter().all(|&u| nbh.is_subset(v, u)))
        .collect()
}

/// The set `{ N[v] : v simplicial }`, deduplicated and canonically ordered.
///
/// An empty result is legal: a graph may have no simplicial vertex (every
/// maximal clique then shares all of its vertices with others).
pub fn independent_maximal_cliques(g: &EdgeSet) -> CliqueSet {
    let adj = g.adjacency();
    let mut unique: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in simplicial_vertices(g) {
        let mut clique = adj[v].clone();
        clique.push(v);
        clique.sort_unstable();
        unique.insert(clique);
    }
    CliqueSet {
        p: g.p(),
        cliques: unique.into_iter().collect(),
    }
}
