use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

/// Per-feature mean and (population) standard deviation of the fitting
/// split. A standard deviation of exactly 0 marks a constant feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn zscore_fit(x: ArrayView2<f64>) -> ZScoreStats {
    let m = x.nrows().max(1) as f64;
    let mean: Vec<f64> = x.sum_axis(Axis(0)).iter().map(|s| s / m).collect();
    let std = x
        .axis_iter(Axis(1))
        .zip(&mean)
        .map(|(col, &mu)| {
            let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / m;
            let sd = var.sqrt();
            // rounding residue on a constant column
            if sd <= 1e-12 * mu.abs().max(1.0) {
                0.0
            } else {
                sd
            }
        })
        .collect();
    ZScoreStats { mean, std }
}

/// Zero-variance features map to 0.
pub fn zscore_apply(x: ArrayView2<f64>, stats: &ZScoreStats) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut row in out.axis_iter_mut(Axis(0)) {
        for ((v, &mu), &sd) in row.iter_mut().zip(&stats.mean).zip(&stats.std) {
            *v = if sd == 0.0 { 0.0 } else { (*v - mu) / sd };
        }
    }
    out
}
