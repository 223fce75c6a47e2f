//! Correlation matrices, thresholded edge sets and candidate threshold grids.
//!
//! A thresholded correlation graph keeps an edge (i, j) exactly when
//! `|r_ij| > tau` (strict). A threshold equal to some `|r_ij|` therefore
//! excludes that edge, so every value of an all-unique grid removes at least
//! one edge relative to the next smaller one.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a correlation matrix was estimated from data or derived from
/// model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Sample,
    Population,
}

/// A symmetric p x p correlation matrix with an exact unit diagonal.
///
/// Symmetry and the unit diagonal are written structurally at construction,
/// never recomputed from floating point arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    p: usize,
    entries: DMatrix<f64>,
    kind: MatrixKind,
}

impl CorrelationMatrix {
    /// Builds a correlation matrix from raw entries, validating symmetry
    /// (within `1e-8`), the unit diagonal (within `1e-8`) and off-diagonal
    /// magnitudes, then writing the exact symmetric form.
    pub fn from_entries(entries: DMatrix<f64>, kind: MatrixKind) -> Result<Self> {
        let p = entries.nrows();
        if p == 0 || entries.ncols() != p {
            return Err(Error::Dimension(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        const TOL: f64 = 1e-8;
        for i in 0..p {
            let d = entries[(i, i)];
            if !d.is_finite() || (d - 1.0).abs() > TOL {
                return Err(Error::Dimension(format!(
                    "diagonal entry ({i}, {i}) = {d} is not 1"
                )));
            }
            for j in (i + 1)..p {
                let a = entries[(i, j)];
                let b = entries[(j, i)];
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > TOL {
                    return Err(Error::Dimension(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not symmetric: {a} vs {b}"
                    )));
                }
                if a.abs() > 1.0 + TOL {
                    return Err(Error::Dimension(format!(
                        "off-diagonal entry ({i}, {j}) = {a} exceeds 1 in magnitude"
                    )));
                }
            }
        }
        let mut exact = DMatrix::zeros(p, p);
        for i in 0..p {
            exact[(i, i)] = 1.0;
            for j in (i + 1)..p {
                let v = 0.5 * (entries[(i, j)] + entries[(j, i)]);
                let v = v.clamp(-1.0, 1.0);
                exact[(i, j)] = v;
                exact[(j, i)] = v;
            }
        }
        Ok(Self {
            p,
            entries: exact,
            kind,
        })
    }

    /// Population correlation matrix implied by standardized loadings:
    /// off-diagonal entries of `lambda * phi * lambda^T`, unit diagonal.
    ///
    /// This is the entry-display form of a standardized factor model, where
    /// the error variances absorb whatever the common part leaves of each
    /// unit variance. The caller is responsible for `lambda` being on the
    /// standardized scale; entries exceeding 1 in magnitude are rejected.
    pub fn from_standardized_loadings(
        lambda: &DMatrix<f64>,
        phi: &DMatrix<f64>,
    ) -> Result<Self> {
        let p = lambda.nrows();
        let d = lambda.ncols();
        if phi.nrows() != d || phi.ncols() != d {
            return Err(Error::Dimension(format!(
                "phi must be {d}x{d}, got {}x{}",
                phi.nrows(),
                phi.ncols()
            )));
        }
        let common = lambda * phi * lambda.transpose();
        let mut entries = DMatrix::zeros(p, p);
        for i in 0..p {
            entries[(i, i)] = 1.0;
            for j in (i + 1)..p {
                let v = common[(i, j)];
                if v.abs() > 1.0 {
                    return Err(Error::Dimension(format!(
                        "implied correlation ({i}, {j}) = {v} exceeds 1 in magnitude"
                    )));
                }
                entries[(i, j)] = v;
                entries[(j, i)] = v;
            }
        }
        Ok(Self {
            p,
            entries,
            kind: MatrixKind::Population,
        })
    }

    pub fn identity(p: usize, kind: MatrixKind) -> Self {
        Self {
            p,
            entries: DMatrix::identity(p, p),
            kind,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Pearson correlation matrix of the columns of an n x p data matrix.
///
/// Requires n >= 2 and every column to have positive sample variance;
/// constant columns are an error rather than silently dropped, so column
/// indices stay meaningful downstream.
pub fn sample_correlation(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    let n = data.nrows();
    let p = data.ncols();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "need at least 2 observations to correlate, got {n}"
        )));
    }
    if p == 0 {
        return Err(Error::Dimension("data has no columns".into()));
    }
    let mut centered = data.clone();
    let mut norms = vec![0.0_f64; p];
    for j in 0..p {
        let mean = data.column(j).sum() / n as f64;
        for i in 0..n {
            centered[(i, j)] -= mean;
        }
        let ss: f64 = centered.column(j).iter().map(|v| v * v).sum();
        if ss <= 0.0 || !ss.is_finite() {
            return Err(Error::ZeroVarianceColumn(j));
        }
        norms[j] = ss.sqrt();
    }
    let mut entries = DMatrix::zeros(p, p);
    for i in 0..p {
        entries[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let dot: f64 = centered
                .column(i)
                .iter()
                .zip(centered.column(j).iter())
                .map(|(a, b)| a * b)
                .sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            entries[(i, j)] = r;
            entries[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix {
        p,
        entries,
        kind: MatrixKind::Sample,
    })
}

/// An undirected graph over p variable vertices, stored as the sorted list
/// of edges (i, j) with i < j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSet {
    p: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeSet {
    /// Builds an edge set, normalizing pair order, sorting and rejecting
    /// self-loops or out-of-range indices. Duplicates are merged.
    pub fn new(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Dimension(format!("self-loop at vertex {a}")));
            }
            if a >= p || b >= p {
                return Err(Error::Dimension(format!(
                    "edge ({a}, {b}) out of range for p = {p}"
                )));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self { p, edges: list })
    }

    pub fn empty(p: usize) -> Self {
        Self { p, edges: Vec::new() }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Sorted adjacency lists, one per vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.p];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Is `other` a subset of this edge set?
    pub fn is_superset_of(&self, other: &EdgeSet) -> bool {
        other.iter().all(|(a, b)| self.contains(a, b))
    }
}

/// Edge set of the graph keeping pairs with `|r_ij| > tau` (strict).
///
/// Applies identically to sample and population matrices.
pub fn threshold_edges(r: &CorrelationMatrix, tau: f64) -> Result<EdgeSet> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {tau}"
        )));
    }
    let p = r.p();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if r.entry(i, j).abs() > tau {
                edges.push((i, j));
            }
        }
    }
    Ok(EdgeSet { p, edges })
}

/// How candidate thresholds are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// Every unique off-diagonal `|r_ij|`, sorted ascending.
    AllUniqueSample,
    /// m equally spaced points strictly inside (0, 1).
    Equidistant(usize),
}

/// A strictly increasing list of candidate thresholds in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    values: Vec<f64>,
    mode: GridMode,
}

impl ThresholdGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Candidate threshold grid for a correlation matrix.
pub fn candidate_thresholds(r: &CorrelationMatrix, mode: GridMode) -> Result<ThresholdGrid> {
    if r.p() < 2 {
        return Err(Error::EmptyGrid);
    }
    let values = match mode {
        GridMode::AllUniqueSample => {
            let mut vals = Vec::new();
            for i in 0..r.p() {
                for j in (i + 1)..r.p() {
                    vals.push(r.entry(i, j).abs());
                }
            }
            vals.sort_by(|a, b| a.partial_cmp(b).expect("correlations are finite"));
            vals.dedup();
            vals
        }
        GridMode::Equidistant(m) => {
            if m == 0 {
                return Err(Error::InvalidArgument(
                    "equidistant grid needs at least one point".into(),
                ));
            }
            (1..=m).map(|k| k as f64 / (m + 1) as f64).collect()
        }
    };
    Ok(ThresholdGrid { values, mode })
}
