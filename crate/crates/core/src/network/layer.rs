use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::HyperParams;
use crate::solvers::batchnorm::batch_norm_apply_inplace;
use crate::solvers::{apply_activation_inplace, batch_norm_fit, BatchNormStats};
use crate::{Error, Result, Scalar};

/// One hidden layer and its classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerModel<T> {
    /// Random input-to-hidden weights, `d_in × n`.
    pub w: Array2<T>,
    pub bias_row: Option<Array1<T>>,
    /// Frozen statistics of the pre-activations on the training data.
    pub bn_stats: Option<BatchNormStats<T>>,
    /// `false` marks neurons pruned from the input of the next layer.
    pub keep_mask: Vec<bool>,
    /// Output weights over `[H | X]`: `n + d` rows, `k` columns.
    pub beta: Array2<T>,
}

impl<T: Scalar> LayerModel<T> {
    /// A layer with fresh weights and no statistics or output weights yet.
    pub fn new(w: Array2<T>, bias_row: Option<Array1<T>>) -> Self {
        let n = w.ncols();
        LayerModel {
            w,
            bias_row,
            bn_stats: None,
            keep_mask: vec![true; n],
            beta: Array2::zeros((0, 0)),
        }
    }

    pub fn n(&self) -> usize {
        self.w.ncols()
    }

    pub fn n_kept(&self) -> usize {
        self.keep_mask.iter().filter(|&&k| k).count()
    }

    /// `input·W + b`.
    pub fn pre_activation(&self, input: ArrayView2<T>) -> Result<Array2<T>> {
        if input.ncols() != self.w.nrows() {
            return Err(Error::dims(format!(
                "layer expects {} inputs, got {}",
                self.w.nrows(),
                input.ncols()
            )));
        }
        let mut pre = input.dot(&self.w);
        if let Some(b) = &self.bias_row {
            pre += b;
        }
        Ok(pre)
    }

    /// Full-width hidden features with the frozen statistics.
    pub fn hidden(&self, input: ArrayView2<T>, hp: &HyperParams) -> Result<Array2<T>> {
        let stats = self.bn_stats.as_ref().ok_or(Error::StatsNotFitted)?;
        let mut h = self.pre_activation(input)?;
        batch_norm_apply_inplace(&mut h, stats, hp.bn_params())?;
        apply_activation_inplace(&mut h, hp.activation);
        Ok(h)
    }

    /// Full-width hidden features, fitting and storing the statistics.
    pub(crate) fn fit_hidden(&mut self, input: ArrayView2<T>, hp: &HyperParams) -> Result<Array2<T>> {
        let mut h = self.pre_activation(input)?;
        let stats = batch_norm_fit(h.view(), T::from_f64_lossy(hp.epsilon))?;
        batch_norm_apply_inplace(&mut h, &stats, hp.bn_params())?;
        apply_activation_inplace(&mut h, hp.activation);
        self.bn_stats = Some(stats);
        Ok(h)
    }

    /// Columns of `h` whose neurons survived pruning.
    pub fn kept(&self, h: ArrayView2<T>) -> Array2<T> {
        if self.keep_mask.iter().all(|&k| k) {
            return h.to_owned();
        }
        let idx: Vec<usize> = self
            .keep_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect();
        h.select(Axis(1), &idx)
    }
}

/// `g(BN(input·W))` restricted to the kept neurons.
///
/// With `fit_mode` the batch-norm statistics are fitted on `input` and
/// stored in the layer; otherwise the stored statistics are used.
pub fn forward_layer<T: Scalar>(
    input: ArrayView2<T>,
    layer: &mut LayerModel<T>,
    hp: &HyperParams,
    fit_mode: bool,
) -> Result<Array2<T>> {
    let h = if fit_mode {
        layer.fit_hidden(input, hp)?
    } else {
        layer.hidden(input, hp)?
    };
    Ok(layer.kept(h.view()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::init_layer_weights;

    fn input() -> Array2<f64> {
        Array2::from_shape_fn((40, 4), |(i, j)| ((i * 31 + j * 17) % 23) as f64 / 7.0 - 1.5)
    }

    fn layer(n: usize) -> LayerModel<f64> {
        let (w, b) = init_layer_weights(4, n, 11, 0);
        LayerModel::new(w, Some(b))
    }

    #[test]
    fn fit_mode_centers_pre_activation_and_relu_is_nonnegative() {
        let x = input();
        let mut l = layer(6);
        let h = forward_layer(x.view(), &mut l, &HyperParams::default(), true).unwrap();
        assert!(h.iter().all(|&v| v >= 0.0));
        let stats = l.bn_stats.clone().unwrap();
        let pre = l.pre_activation(x.view()).unwrap();
        for (j, col) in pre.axis_iter(Axis(1)).enumerate() {
            let normalized = col.mapv(|v| (v - stats.mu[j]) / (stats.sigma2[j] + stats.epsilon).sqrt());
            assert!(normalized.mean().unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn mask_drops_columns() {
        let x = input();
        let mut l = layer(5);
        l.keep_mask = vec![true, false, true, false, true];
        let h = forward_layer(x.view(), &mut l, &HyperParams::default(), true).unwrap();
        assert_eq!(h.ncols(), 3);
    }

    #[test]
    fn frozen_stats_reproduce_fit() {
        let x = input();
        let mut l = layer(8);
        let hp = HyperParams { gamma: 1.3, alpha: -0.4, ..Default::default() };
        let fitted = forward_layer(x.view(), &mut l, &hp, true).unwrap();
        let frozen = forward_layer(x.view(), &mut l, &hp, false).unwrap();
        assert_eq!(fitted, frozen);
    }

    #[test]
    fn errors() {
        let x = input();
        let mut l = layer(3);
        assert!(matches!(
            forward_layer(x.view(), &mut l, &HyperParams::default(), false),
            Err(Error::StatsNotFitted)
        ));
        let narrow = Array2::<f64>::zeros((3, 2));
        assert!(matches!(
            forward_layer(narrow.view(), &mut l, &HyperParams::default(), true),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
