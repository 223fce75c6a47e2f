//! Factor-model structures: factor counts plus loading supports, and the
//! conversion from independent maximal cliques.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cliques::CliqueSet;
use crate::corr::EdgeSet;
use crate::error::{Error, Result};

/// The structure of a factor model: the number of factors `d` and the set of
/// unconstrained loading positions `(variable, factor)`, 0-based.
///
/// Serializes as `{"p": .., "d": .., "support": [[i, j], ..]}` with the
/// support sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FactorStructure {
    p: usize,
    d: usize,
    support: BTreeSet<(usize, usize)>,
}

impl FactorStructure {
    /// Validates index ranges, that no factor column is empty, and the
    /// dimension-reduction premise `d < p` (for d > 0).
    pub fn new(
        p: usize,
        d: usize,
        support: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let support: BTreeSet<(usize, usize)> = support.into_iter().collect();
        if d > 0 && d >= p {
            return Err(Error::Dimension(format!(
                "factor count d = {d} must be smaller than variable count p = {p}"
            )));
        }
        let mut seen = vec![false; d];
        for &(i, j) in &support {
            if i >= p || j >= d {
                return Err(Error::Dimension(format!(
                    "support entry ({i}, {j}) out of range for p = {p}, d = {d}"
                )));
            }
            seen[j] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Dimension(format!(
                "factor column {empty} has no support entries"
            )));
        }
        Ok(Self { p, d, support })
    }

    /// The noise-only structure with no factors.
    pub fn noise_only(p: usize) -> Self {
        Self {
            p,
            d: 0,
            support: BTreeSet::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn support(&self) -> &BTreeSet<(usize, usize)> {
        &self.support
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn contains(&self, variable: usize, factor: usize) -> bool {
        self.support.contains(&(variable, factor))
    }

    /// Parent factors of a variable.
    pub fn parents(&self, variable: usize) -> Vec<usize> {
        self.support
            .iter()
            .filter(|&&(i, _)| i == variable)
            .map(|&(_, j)| j)
            .collect()
    }

    /// Child variables of a factor.
    pub fn children(&self, factor: usize) -> Vec<usize> {
        self.support
            .iter()
            .filter(|&&(_, j)| j == factor)
            .map(|&(i, _)| i)
            .collect()
    }

    /// The shared-parent edge set: pairs of variables whose parent sets
    /// intersect. This is the population graph a thresholdable model's
    /// correlations separate from its complement.
    pub fn shared_parent_edges(&self) -> EdgeSet {
        let mut parents = vec![BTreeSet::new(); self.p];
        for &(i, j) in &self.support {
            parents[i].insert(j);
        }
        let mut edges = Vec::new();
        for a in 0..self.p {
            for b in (a + 1)..self.p {
                if !parents[a].is_disjoint(&parents[b]) {
                    edges.push((a, b));
                }
            }
        }
        EdgeSet::new(self.p, edges).expect("indices in range by construction")
    }

    /// Reorders factor columns by their sorted child lists (lexicographic,
    /// which puts the smallest child first). Idempotent; equality of
    /// canonical forms defines structure identity.
    pub fn canonicalize(&self) -> FactorStructure {
        let mut columns: Vec<Vec<usize>> = (0..self.d).map(|j| self.children(j)).collect();
        columns.sort();
        let support = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&i| (i, j)))
            .collect();
        FactorStructure {
            p: self.p,
            d: self.d,
            support,
        }
    }
}

impl<'de> Deserialize<'de> for FactorStructure {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            p: usize,
            d: usize,
            support: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        FactorStructure::new(raw.p, raw.d, raw.support).map_err(serde::de::Error::custom)
    }
}

/// What to do with size-one cliques when reading a structure off a graph.
///
/// A single-indicator factor is not identifiable (its loading and error
/// variance are confounded), so the default drops singletons and leaves
/// their vertices as pure-noise variables. `Keep` applies the literal
/// clique-to-structure steps unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingletonPolicy {
    #[default]
    Drop,
    Keep,
}

/// Converts a clique set into a factor structure: one factor per retained
/// clique, loading support `{(i, j) : i ∈ C_j}`. Variables in no retained
/// clique keep an all-zero loading row.
pub fn cliques_to_structure(c: &CliqueSet, policy: SingletonPolicy) -> FactorStructure {
    let retained: Vec<&Vec<usize>> = c
        .cliques()
        .iter()
        .filter(|cl| policy == SingletonPolicy::Keep || cl.len() > 1)
        .collect();
    let support: BTreeSet<(usize, usize)> = retained
        .iter()
        .enumerate()
        .flat_map(|(j, cl)| cl.iter().map(move |&i| (i, j)))
        .collect();
    FactorStructure {
        p: c.p(),
        d: retained.len(),
        support,
    }
}

/// Per-factor unique indicators and whether every factor has one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueChildReport {
    /// `unique_children[k]` is ch(k) minus the union of all other children sets.
    pub unique_children: Vec<Vec<usize>>,
    /// True iff every factor has at least one unique indicator.
    pub holds: bool,
}

/// Evaluates the unique child condition: each factor must have at least one
/// indicator loading on it alone. Vacuously true for d = 0.
pub fn unique_child_report(s: &FactorStructure) -> UniqueChildReport {
    let mut counts = vec![0usize; s.p()];
    for &(i, _) in s.support() {
        counts[i] += 1;
    }
    let unique_children: Vec<Vec<usize>> = (0..s.d())
        .map(|k| {
            s.children(k)
                .into_iter()
                .filter(|&i| counts[i] == 1)
                .collect()
        })
        .collect();
    let holds = unique_children.iter().all(|u| !u.is_empty());
    UniqueChildReport {
        unique_children,
        holds,
    }
}
