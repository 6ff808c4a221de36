use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cv::RunResult;
use super::stats::{average_ranks, wilcoxon_signed_rank, WilcoxonResult};
use crate::{Error, Result};

/// Significance level of the win/loss symbols.
pub const SIGNIFICANCE: f64 = 0.05;

/// Wilcoxon comparison of method `a` against method `b` over datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    /// `None` when too few datasets differ for the test.
    pub test: Option<WilcoxonResult>,
    /// `+` when `a` is significantly better, `-` when significantly worse,
    /// `=` otherwise.
    pub symbol: char,
}

fn symbol(test: Option<&WilcoxonResult>) -> char {
    match test {
        Some(t) if t.p_value < SIGNIFICANCE && t.statistic > t.w_minus => '+',
        Some(t) if t.p_value < SIGNIFICANCE && t.statistic < t.w_minus => '-',
        _ => '=',
    }
}

/// Method × dataset accuracies with average ranks and pairwise tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `accuracy[method][dataset]`.
    pub accuracy: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
    pub pairwise: Vec<PairwiseTest>,
    /// Datasets left out because some method has no result for them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped_datasets: Vec<String>,
}

impl ComparisonReport {
    /// Builds the report from a complete matrix. Constant accuracies of
    /// external methods can be mixed in here.
    pub fn from_matrix(methods: Vec<String>, datasets: Vec<String>, accuracy: Vec<Vec<f64>>) -> Result<Self> {
        if accuracy.len() != methods.len() {
            return Err(Error::LengthMismatch {
                left: accuracy.len(),
                right: methods.len(),
            });
        }
        if accuracy.iter().any(|row| row.len() != datasets.len()) {
            return Err(Error::IncompleteMatrix("row length differs from dataset count".into()));
        }
        let average_ranks = average_ranks(&accuracy)?;
        let mut pairwise = Vec::new();
        for i in 0..methods.len() {
            for j in i + 1..methods.len() {
                let test = match wilcoxon_signed_rank(&accuracy[i], &accuracy[j]) {
                    Ok(t) => Some(t),
                    Err(Error::TooFewPairs(_)) => None,
                    Err(e) => return Err(e),
                };
                pairwise.push(PairwiseTest {
                    a: methods[i].clone(),
                    b: methods[j].clone(),
                    symbol: symbol(test.as_ref()),
                    test,
                });
            }
        }
        Ok(ComparisonReport {
            methods,
            datasets,
            accuracy,
            average_ranks,
            pairwise,
            dropped_datasets: Vec::new(),
        })
    }

    /// One method per variant, one column per dataset, each entry the mean
    /// accuracy of the matching result. Methods and datasets keep their order
    /// of first appearance; datasets missing for some method are dropped.
    pub fn from_results(results: &[RunResult]) -> Result<Self> {
        let mut methods: Vec<String> = Vec::new();
        let mut datasets: Vec<String> = Vec::new();
        for r in results {
            let m = r.variant.to_string();
            if !methods.contains(&m) {
                methods.push(m);
            }
            if !datasets.contains(&r.dataset) {
                datasets.push(r.dataset.clone());
            }
        }
        let lookup = |m: &str, d: &str| {
            results
                .iter()
                .find(|r| r.variant.name() == m && r.dataset == d)
                .map(|r| r.mean)
        };
        let (kept, dropped): (Vec<String>, Vec<String>) = datasets
            .into_iter()
            .partition(|d| methods.iter().all(|m| lookup(m, d).is_some()));
        let accuracy = methods
            .iter()
            .map(|m| kept.iter().map(|d| lookup(m, d).unwrap_or(f64::NAN)).collect())
            .collect();
        let mut report = Self::from_matrix(methods, kept, accuracy)?;
        report.dropped_datasets = dropped;
        Ok(report)
    }

    /// Plain-text rendering: accuracies in percent with the average rank
    /// row, then the pairwise tests.
    pub fn render_text(&self) -> String {
        let name_w = self.datasets.iter().map(String::len).chain([12]).max().unwrap_or(12);
        let col_w = self.methods.iter().map(String::len).chain([8]).max().unwrap_or(8) + 2;
        let mut out = String::new();
        let _ = write!(out, "{:name_w$}", "dataset");
        for m in &self.methods {
            let _ = write!(out, "{m:>col_w$}");
        }
        out.push('\n');
        for (j, d) in self.datasets.iter().enumerate() {
            let _ = write!(out, "{d:name_w$}");
            for row in &self.accuracy {
                let _ = write!(out, "{:>col_w$.2}", 100.0 * row[j]);
            }
            out.push('\n');
        }
        let _ = write!(out, "{:name_w$}", "average rank");
        for r in &self.average_ranks {
            let _ = write!(out, "{r:>col_w$.2}");
        }
        out.push('\n');
        if !self.pairwise.is_empty() {
            out.push('\n');
            for t in &self.pairwise {
                match &t.test {
                    Some(w) => {
                        let _ = writeln!(
                            out,
                            "{} vs {}: W+ = {}, W- = {}, n = {}, p = {:.4} {}",
                            t.a, t.b, w.statistic, w.w_minus, w.n, w.p_value, t.symbol
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{} vs {}: too few differing datasets {}", t.a, t.b, t.symbol);
                    }
                }
            }
        }
        if !self.dropped_datasets.is_empty() {
            let _ = writeln!(out, "\nincomplete, not ranked: {}", self.dropped_datasets.join(", "));
        }
        out
    }
}

/// Mean accuracies of the datasets present in both result sets, in the
/// order of `a`. Results are matched by dataset name.
pub fn paired_means(a: &[RunResult], b: &[RunResult]) -> (Vec<String>, Vec<f64>, Vec<f64>) {
    let mut names = Vec::new();
    let mut va = Vec::new();
    let mut vb = Vec::new();
    for ra in a {
        if names.contains(&ra.dataset) {
            continue;
        }
        if let Some(rb) = b.iter().find(|r| r.dataset == ra.dataset) {
            names.push(ra.dataset.clone());
            va.push(ra.mean);
            vb.push(rb.mean);
        }
    }
    (names, va, vb)
}
