//! Structural accuracy scores and assumption diagnostics.
//!
//! The Hamming distance between two loading supports is minimized over
//! factor-column permutations. The total symmetric difference is separable
//! across matched column pairs, so a cubic-time optimal assignment on the
//! per-column-pair disagreement costs equals the brute-force minimum over
//! all permutations; brute force would be infeasible at d in the hundreds.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::corr::{CorrelationMatrix, EdgeSet};
use crate::error::{Error, Result};
use crate::structure::FactorStructure;

/// Permutation-minimized structural disagreement between an estimated and a
/// true loading support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralScore {
    /// Minimum Hamming distance over column permutations: fp + fn.
    pub hd: usize,
    /// F1 of the support at the minimizing permutation; 1 when both supports
    /// are empty.
    pub f1: f64,
    /// `permutation[a]` is the truth column matched to estimate column `a`
    /// (columns past either structure's width are zero padding).
    pub permutation: Vec<usize>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Minimum-cost assignment on a square cost matrix via the O(n^3)
/// potential-based Hungarian method. Returns `assign[row] = col`.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    const INF: f64 = f64::INFINITY;
    // 1-based potentials; p[j] is the row matched to column j.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// Permutation-minimized Hamming distance and F1 between two structures.
///
/// The narrower structure is padded with zero columns to the wider width
/// before matching.
pub fn structural_score(
    est: &FactorStructure,
    truth: &FactorStructure,
) -> Result<StructuralScore> {
    if est.p() != truth.p() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has p = {}, truth has p = {}",
            est.p(),
            truth.p()
        )));
    }
    let width = est.d().max(truth.d());
    let column = |s: &FactorStructure, j: usize| -> BTreeSet<usize> {
        if j < s.d() {
            s.children(j).into_iter().collect()
        } else {
            BTreeSet::new()
        }
    };
    let est_cols: Vec<BTreeSet<usize>> = (0..width).map(|j| column(est, j)).collect();
    let truth_cols: Vec<BTreeSet<usize>> = (0..width).map(|j| column(truth, j)).collect();
    let cost: Vec<Vec<f64>> = est_cols
        .iter()
        .map(|a| {
            truth_cols
                .iter()
                .map(|b| a.symmetric_difference(b).count() as f64)
                .collect()
        })
        .collect();
    let permutation = min_cost_assignment(&cost);
    let mut tp = 0;
    for (a, &b) in permutation.iter().enumerate() {
        tp += est_cols[a].intersection(&truth_cols[b]).count();
    }
    let fp = est.support_len() - tp;
    let fn_ = truth.support_len() - tp;
    let f1 = if 2 * tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    Ok(StructuralScore {
        hd: fp + fn_,
        f1,
        permutation,
        tp,
        fp,
        fn_,
    })
}

/// Separation diagnostic for a population (or sample) correlation matrix
/// against a known shared-parent edge set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdabilityReport {
    pub thresholdable: bool,
    /// Largest correlation magnitude over pairs sharing no parent
    /// (0 when every pair shares one).
    pub max_between: f64,
    /// Smallest correlation magnitude over pairs sharing a parent
    /// (+inf when no pair does).
    pub min_within: f64,
    /// The open separation interval, present when thresholdable.
    pub interval: Option<(f64, f64)>,
}

/// Checks strict separation of within- from between-factor correlation
/// magnitudes: thresholdable iff `max_between < min_within`.
///
/// Degenerate conventions: with no within pairs, min_within is +inf and the
/// model counts as thresholdable only when p <= 1 or every between
/// correlation is exactly zero (nothing to separate).
pub fn thresholdability(
    sig: &CorrelationMatrix,
    e0: &EdgeSet,
) -> Result<ThresholdabilityReport> {
    if sig.p() != e0.p() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has p = {}, edge set has p = {}",
            sig.p(),
            e0.p()
        )));
    }
    let p = sig.p();
    let mut max_between = 0.0_f64;
    let mut min_within = f64::INFINITY;
    let mut any_within = false;
    for i in 0..p {
        for j in (i + 1)..p {
            let v = sig.entry(i, j).abs();
            if e0.contains(i, j) {
                any_within = true;
                min_within = min_within.min(v);
            } else {
                max_between = max_between.max(v);
            }
        }
    }
    let thresholdable = if any_within {
        max_between < min_within
    } else {
        p <= 1 || max_between == 0.0
    };
    Ok(ThresholdabilityReport {
        thresholdable,
        max_between,
        min_within,
        interval: thresholdable.then_some((max_between, min_within)),
    })
}

/// Fraction of variable pairs a best-case threshold sorts correctly:
/// within pairs strictly above the largest between magnitude, plus between
/// pairs strictly below the smallest within magnitude, over p(p-1)/2.
///
/// Ties with the relevant extremum count as unsorted. Empty extrema follow
/// the natural sup/inf conventions, so a fully separated matrix scores 1.
pub fn sortability(sig: &CorrelationMatrix, e0: &EdgeSet) -> Result<f64> {
    if sig.p() != e0.p() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has p = {}, edge set has p = {}",
            sig.p(),
            e0.p()
        )));
    }
    let p = sig.p();
    if p < 2 {
        return Err(Error::Dimension(
            "sortability needs at least two variables".into(),
        ));
    }
    let mut within = Vec::new();
    let mut between = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let v = sig.entry(i, j).abs();
            if e0.contains(i, j) {
                within.push(v);
            } else {
                between.push(v);
            }
        }
    }
    let max_between = between.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_within = within.iter().copied().fold(f64::INFINITY, f64::min);
    let sorted = within.iter().filter(|&&v| v > max_between).count()
        + between.iter().filter(|&&v| v < min_within).count();
    Ok(sorted as f64 / (p * (p - 1) / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::MatrixKind;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    fn independent_clusters(p: usize, d: usize) -> FactorStructure {
        let per = p / d;
        FactorStructure::new(p, d, (0..p).map(|i| (i, (i / per).min(d - 1)))).unwrap()
    }

    #[test]
    fn identical_structures_score_perfectly() {
        let s = independent_clusters(20, 5);
        let score = structural_score(&s, &s).unwrap();
        assert_eq!(score.hd, 0);
        assert_eq!(score.f1, 1.0);
    }

    #[test]
    fn one_missing_loading_matches_published_scores() {
        // 20 variables, 5 factors, 4 children each; estimate drops one entry.
        let truth = independent_clusters(20, 5);
        let est = FactorStructure::new(
            20,
            5,
            truth.support().iter().copied().filter(|&e| e != (0, 0)),
        )
        .unwrap();
        let score = structural_score(&est, &truth).unwrap();
        assert_eq!(score.hd, 1);
        assert_eq!((score.tp, score.fp, score.fn_), (19, 0, 1));
        assert_relative_eq!(score.f1, 38.0 / 39.0, epsilon = 1e-12);
        assert_relative_eq!(score.f1, 0.974, epsilon = 5e-4);
    }

    #[test]
    fn padding_handles_unequal_widths() {
        let truth = independent_clusters(6, 2);
        let est = FactorStructure::new(6, 1, [(0, 0), (1, 0), (2, 0)]).unwrap();
        let score = structural_score(&est, &truth).unwrap();
        assert_eq!(score.hd, 3);
        assert_eq!((score.tp, score.fp, score.fn_), (3, 0, 3));
    }

    #[test]
    fn empty_supports_are_vacuously_perfect() {
        let a = FactorStructure::noise_only(4);
        let score = structural_score(&a, &a).unwrap();
        assert_eq!(score.hd, 0);
        assert_eq!(score.f1, 1.0);
    }

    #[test]
    fn hd_is_symmetric_and_permutation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let (a, b) = (random_structure(&mut rng), random_structure(&mut rng));
            let ab = structural_score(&a, &b).unwrap();
            let ba = structural_score(&b, &a).unwrap();
            assert_eq!(ab.hd, ba.hd);
            // Column-permuting the estimate changes nothing.
            if a.d() > 1 {
                let shifted = FactorStructure::new(
                    a.p(),
                    a.d(),
                    a.support().iter().map(|&(i, j)| (i, (j + 1) % a.d())),
                )
                .unwrap();
                let s2 = structural_score(&shifted, &b).unwrap();
                assert_eq!(s2.hd, ab.hd);
                assert_relative_eq!(s2.f1, ab.f1, epsilon = 1e-12);
            }
        }
    }

    fn random_structure(rng: &mut impl Rng) -> FactorStructure {
        let p = 9;
        let d = rng.gen_range(1..5usize);
        let mut support: Vec<(usize, usize)> = (0..d).map(|j| (rng.gen_range(0..p), j)).collect();
        for _ in 0..rng.gen_range(0..12) {
            support.push((rng.gen_range(0..p), rng.gen_range(0..d)));
        }
        FactorStructure::new(p, d, support).unwrap()
    }

    /// Brute-force minimum Hamming distance over all column permutations.
    fn brute_force_hd(est: &FactorStructure, truth: &FactorStructure) -> usize {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for rest in permutations(n - 1) {
                for pos in 0..n {
                    let mut perm = rest.clone();
                    perm.insert(pos, n - 1);
                    out.push(perm);
                }
            }
            out
        }
        let width = est.d().max(truth.d());
        let col = |s: &FactorStructure, j: usize| -> BTreeSet<usize> {
            if j < s.d() {
                s.children(j).into_iter().collect()
            } else {
                BTreeSet::new()
            }
        };
        permutations(width)
            .into_iter()
            .map(|perm| {
                (0..width)
                    .map(|a| col(est, a).symmetric_difference(&col(truth, perm[a])).count())
                    .sum()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn assignment_matches_brute_force_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let (a, b) = (random_structure(&mut rng), random_structure(&mut rng));
            let fast = structural_score(&a, &b).unwrap().hd;
            assert_eq!(fast, brute_force_hd(&a, &b));
        }
    }

    #[test]
    fn assignment_solver_agrees_with_permutation_search_on_costs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..6usize);
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..10.0)).collect())
                .collect();
            let assign = min_cost_assignment(&cost);
            let total: f64 = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            let mut cols: Vec<usize> = assign.clone();
            cols.sort_unstable();
            assert_eq!(cols, (0..n).collect::<Vec<_>>());
            let best = brute_force_min(&cost);
            assert!(total <= best + 1e-9, "{total} vs {best}");
        }
    }

    fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut cols, 0, &mut |perm| {
            let t: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            if t < best {
                best = t;
            }
        });
        best
    }

    fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    fn worked_population() -> (CorrelationMatrix, EdgeSet) {
        let mut lambda = DMatrix::zeros(5, 2);
        for &(i, j) in &[(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (4, 1)] {
            lambda[(i, j)] = 0.7;
        }
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        let r = CorrelationMatrix::from_standardized_loadings(&lambda, &phi).unwrap();
        let s = FactorStructure::new(5, 2, [(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (4, 1)])
            .unwrap();
        (r, s.shared_parent_edges())
    }

    #[test]
    fn orthogonal_disjoint_model_is_trivially_thresholdable() {
        let mut lambda = DMatrix::zeros(4, 2);
        lambda[(0, 0)] = 0.7;
        lambda[(1, 0)] = 0.6;
        lambda[(2, 1)] = 0.8;
        lambda[(3, 1)] = 0.7;
        let r =
            CorrelationMatrix::from_standardized_loadings(&lambda, &DMatrix::identity(2, 2))
                .unwrap();
        let s = FactorStructure::new(4, 2, [(0, 0), (1, 0), (2, 1), (3, 1)]).unwrap();
        let report = thresholdability(&r, &s.shared_parent_edges()).unwrap();
        assert!(report.thresholdable);
        assert_eq!(report.max_between, 0.0);
    }

    #[test]
    fn worked_population_separation_interval() {
        let (r, e0) = worked_population();
        let report = thresholdability(&r, &e0).unwrap();
        assert!(report.thresholdable);
        let (lo, hi) = report.interval.unwrap();
        assert_relative_eq!(lo, 0.147, epsilon = 1e-12);
        assert_relative_eq!(hi, 0.49, epsilon = 1e-12);
    }

    #[test]
    fn thresholdable_inputs_sort_perfectly() {
        let (r, e0) = worked_population();
        assert_eq!(sortability(&r, &e0).unwrap(), 1.0);
    }

    #[test]
    fn hand_enumerated_sortability() {
        // Four variables, factors {0,1} and {2,3}; one between entry (0.4)
        // exceeds one within entry (0.3): the 0.6 within pair and the three
        // 0.1 between pairs sort, 4 of 6 total.
        let entries = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.6, 0.4, 0.1, //
                0.6, 1.0, 0.1, 0.1, //
                0.4, 0.1, 1.0, 0.3, //
                0.1, 0.1, 0.3, 1.0,
            ],
        );
        let r = CorrelationMatrix::from_entries(entries, MatrixKind::Population).unwrap();
        let s = FactorStructure::new(4, 2, [(0, 0), (1, 0), (2, 1), (3, 1)]).unwrap();
        let got = sortability(&r, &s.shared_parent_edges()).unwrap();
        assert_relative_eq!(got, 4.0 / 6.0, epsilon = 1e-12);
        assert!(!thresholdability(&r, &s.shared_parent_edges()).unwrap().thresholdable);
    }

    #[test]
    fn sortability_one_iff_thresholdable_without_ties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = 6;
            let s = FactorStructure::new(p, 2, (0..p).map(|i| (i, i / 3))).unwrap();
            let e0 = s.shared_parent_edges();
            let mut entries = DMatrix::identity(p, p);
            for i in 0..p {
                for j in (i + 1)..p {
                    let v: f64 = rng.gen_range(-0.9..0.9);
                    entries[(i, j)] = v;
                    entries[(j, i)] = v;
                }
            }
            let r = CorrelationMatrix::from_entries(entries, MatrixKind::Population).unwrap();
            let report = thresholdability(&r, &e0).unwrap();
            let sort = sortability(&r, &e0).unwrap();
            assert_eq!(report.thresholdable, sort == 1.0);
        }
    }
}
