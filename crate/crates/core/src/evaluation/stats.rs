use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Largest number of non-zero differences handled by the exact distribution.
pub const EXACT_MAX_PAIRS: usize = 20;

/// Ranks of `values` in ascending order starting at 1, ties sharing the mean
/// of their positions.
pub fn average_ranks_ascending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Per-dataset ranks of an accuracy column: the most accurate method gets 1.
pub fn rank_column(accuracies: &[f64]) -> Vec<f64> {
    let negated: Vec<f64> = accuracies.iter().map(|a| -a).collect();
    average_ranks_ascending(&negated)
}

/// Mean rank of each method over datasets; `matrix[method][dataset]`.
pub fn average_ranks(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let methods = matrix.len();
    let datasets = matrix.first().map_or(0, Vec::len);
    if methods == 0 || datasets == 0 {
        return Err(Error::IncompleteMatrix("no methods or datasets".into()));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != datasets {
            return Err(Error::IncompleteMatrix(format!(
                "method {i} has {} entries, expected {datasets}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::IncompleteMatrix(format!("missing value for method {i}, dataset {j}")));
        }
    }
    let mut totals = vec![0.0; methods];
    for j in 0..datasets {
        let column: Vec<f64> = matrix.iter().map(|row| row[j]).collect();
        for (t, r) in totals.iter_mut().zip(rank_column(&column)) {
            *t += r;
        }
    }
    Ok(totals.into_iter().map(|t| t / datasets as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of positive differences `a − b`.
    pub statistic: f64,
    /// Sum of the ranks of negative differences.
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Number of sign assignments giving each achievable doubled rank sum.
/// Doubled ranks are integers even with average-rank ties.
fn signed_rank_counts(doubled: &[usize]) -> Vec<f64> {
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled {
        reach += r;
        for s in (r..=reach).rev() {
            counts[s] += counts[s - r];
        }
    }
    counts
}

/// Wilcoxon signed-rank test of paired samples.
///
/// Zero differences are dropped. With at most [`EXACT_MAX_PAIRS`] remaining
/// pairs the null distribution is enumerated exactly; beyond that a normal
/// approximation with tie-corrected variance (no continuity correction) is
/// used. The p-value is `min(1, 2·min(P(W⁺ ≤ w), P(W⁺ ≥ w)))`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n < 5 {
        return Err(Error::TooFewPairs(n));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks_ascending(&abs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w_minus = (n * (n + 1)) as f64 / 2.0 - w_plus;

    let (p_value, exact) = if n <= EXACT_MAX_PAIRS {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let counts = signed_rank_counts(&doubled);
        let w2 = (2.0 * w_plus).round() as usize;
        let lower: f64 = counts[..=w2].iter().sum();
        let upper: f64 = counts[w2..].iter().sum();
        let total = 2f64.powi(n as i32);
        ((2.0 * lower.min(upper) / total).min(1.0), true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            let t = (j - i) as f64;
            tie_term += t * t * t - t;
            i = j;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (w_plus - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let tail = normal.cdf(-z.abs());
        ((2.0 * tail).min(1.0), false)
    };
    Ok(WilcoxonResult {
        statistic: w_plus,
        w_minus,
        n,
        p_value,
        exact,
    })
}
