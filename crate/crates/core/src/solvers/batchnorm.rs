use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Default `ε` added to the variance before taking the square root.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Per-column statistics of the pre-activation values, frozen after fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormStats<T> {
    pub mu: Array1<T>,
    /// Population variance (divisor `m`).
    pub sigma2: Array1<T>,
    pub epsilon: T,
}

/// Fixed scale `γ` and shift `α` applied after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchNormParams {
    pub gamma: f64,
    pub alpha: f64,
}

impl Default for BatchNormParams {
    fn default() -> Self {
        BatchNormParams { gamma: 1.0, alpha: 0.0 }
    }
}

pub fn batch_norm_fit<T: Scalar>(h: ArrayView2<T>, epsilon: T) -> Result<BatchNormStats<T>> {
    let m = h.nrows();
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    let inv_m = T::one() / T::from_usize_lossy(m);
    let mu = h.sum_axis(Axis(0)).mapv(|s| s * inv_m);
    let mut sigma2 = Array1::<T>::zeros(h.ncols());
    for row in h.axis_iter(Axis(0)) {
        for ((acc, &x), &mean) in sigma2.iter_mut().zip(row.iter()).zip(mu.iter()) {
            let d = x - mean;
            *acc = *acc + d * d;
        }
    }
    sigma2.mapv_inplace(|s| s * inv_m);
    Ok(BatchNormStats { mu, sigma2, epsilon })
}

/// `γ·(x − μ)/√(σ² + ε) + α`, column by column.
pub fn batch_norm_apply<T: Scalar>(
    h: ArrayView2<T>,
    stats: &BatchNormStats<T>,
    params: BatchNormParams,
) -> Result<Array2<T>> {
    let mut out = h.to_owned();
    batch_norm_apply_inplace(&mut out, stats, params)?;
    Ok(out)
}

pub(crate) fn batch_norm_apply_inplace<T: Scalar>(
    h: &mut Array2<T>,
    stats: &BatchNormStats<T>,
    params: BatchNormParams,
) -> Result<()> {
    if h.ncols() != stats.mu.len() || stats.sigma2.len() != stats.mu.len() {
        return Err(Error::dims(format!(
            "batch-norm stats cover {} columns, input has {}",
            stats.mu.len(),
            h.ncols()
        )));
    }
    let gamma = T::from_f64_lossy(params.gamma);
    let alpha = T::from_f64_lossy(params.alpha);
    let scale: Vec<T> = stats
        .sigma2
        .iter()
        .map(|&s2| gamma / (s2 + stats.epsilon).sqrt())
        .collect();
    for mut row in h.axis_iter_mut(Axis(0)) {
        for ((x, &mean), &s) in row.iter_mut().zip(stats.mu.iter()).zip(scale.iter()) {
            *x = (*x - mean) * s + alpha;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn fit_small_columns() {
        let s = batch_norm_fit(array![[1.0f64], [2.0], [3.0]].view(), 1e-5).unwrap();
        assert_eq!(s.mu[0], 2.0);
        assert!((s.sigma2[0] - 2.0 / 3.0).abs() < 1e-15);

        let s = batch_norm_fit(array![[5.0], [5.0], [5.0]].view(), 1e-5).unwrap();
        assert_eq!((s.mu[0], s.sigma2[0]), (5.0, 0.0));

        let s = batch_norm_fit(array![[7.0]].view(), 1e-5).unwrap();
        assert_eq!((s.mu[0], s.sigma2[0]), (7.0, 0.0));
    }

    #[test]
    fn fit_empty_fails() {
        let h = Array2::<f64>::zeros((0, 3));
        assert!(matches!(batch_norm_fit(h.view(), 1e-5), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn apply_scales_and_shifts() {
        let h = array![[1.0f64], [2.0], [3.0]];
        let s = batch_norm_fit(h.view(), 0.0).unwrap();
        let plain = batch_norm_apply(h.view(), &s, BatchNormParams::default()).unwrap();
        for (got, want) in plain.iter().zip([-1.22474, 0.0, 1.22474]) {
            assert!((got - want).abs() < 1e-5);
        }
        let shifted = batch_norm_apply(h.view(), &s, BatchNormParams { gamma: 2.0, alpha: 1.0 }).unwrap();
        for (got, want) in shifted.iter().zip([-1.44949, 1.0, 3.44949]) {
            assert!((got - want).abs() < 1e-5);
        }
    }

    #[test]
    fn constant_column_maps_to_shift() {
        let h = array![[5.0], [5.0], [5.0]];
        let s = batch_norm_fit(h.view(), 1e-5).unwrap();
        let out = batch_norm_apply(h.view(), &s, BatchNormParams { gamma: 1.5, alpha: -0.7 }).unwrap();
        assert!(out.iter().all(|&v| v == -0.7));
    }

    #[test]
    fn column_count_checked() {
        let s = batch_norm_fit(array![[1.0, 2.0]].view(), 1e-5).unwrap();
        let err = batch_norm_apply(array![[1.0]].view(), &s, BatchNormParams::default()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn self_fit_is_centered() {
        let h = Array2::from_shape_fn((50, 6), |(i, j)| ((i * 13 + j * 29) % 17) as f64 * (j as f64 + 1.0) - 3.0);
        let s = batch_norm_fit(h.view(), 1e-5).unwrap();
        let out = batch_norm_apply(h.view(), &s, BatchNormParams::default()).unwrap();
        for (j, col) in out.axis_iter(Axis(1)).enumerate() {
            let mean = col.mean().unwrap();
            let var = col.mapv(|v| (v - mean).powi(2)).mean().unwrap();
            assert!(mean.abs() <= 1e-9);
            let want = s.sigma2[j] / (s.sigma2[j] + 1e-5);
            assert!((var - want).abs() <= 1e-6);
        }
    }
}
