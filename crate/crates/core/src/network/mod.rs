//! The edRVFL family: random layer generation, training with optional
//! sample weighting and neuron pruning, ensemble prediction and model files.
//!
//! One training routine covers all four variants. `omega_r = 1` disables
//! weighting and `p = 0` disables pruning, so plain edRVFL, WedRVFL, PedRVFL
//! and WPedRVFL differ only in their hyperparameters.

mod hyperparams;
mod init;
mod io;
mod layer;
mod path;
mod predict;
mod pruning;
mod train;
mod weighting;

pub use hyperparams::{Aggregation, HyperParams};
pub use init::init_layer_weights;
pub use io::{load_model, save_model, MODEL_FORMAT_VERSION};
pub use layer::{forward_layer, LayerModel};
pub use path::{train_lambda_path, LambdaPath};
pub use predict::{aggregate, argmax_rows, predict, predict_prefix, LayerOutputs};
pub use pruning::{neuron_importance, prune_mask};
pub use train::{train, Trained};
pub use weighting::{update_sample_weights, MAX_WRONG_WEIGHT};

pub use crate::solvers::Activation;

use ndarray::{Array2, ArrayView2};

use crate::dataset::ZScoreStats;
use crate::{Error, Result, Scalar};

/// A trained ensemble: the unit that gets serialized.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel<T> {
    pub hyperparams: HyperParams,
    pub norm_stats: ZScoreStats,
    pub label_names: Vec<String>,
    pub layers: Vec<LayerModel<T>>,
}

impl<T: Scalar> EnsembleModel<T> {
    pub fn k(&self) -> usize {
        self.label_names.len()
    }

    /// Number of raw input features.
    pub fn d(&self) -> usize {
        self.norm_stats.mean.len()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn normalize(&self, raw: ArrayView2<f64>) -> Result<Array2<T>> {
        if raw.ncols() != self.d() {
            return Err(Error::dims(format!("model expects {} features, got {}", self.d(), raw.ncols())));
        }
        Ok(crate::dataset::zscore_apply(raw, &self.norm_stats).mapv(T::from_f64_lossy))
    }

    /// Pre-activation values `input·W + b` of every layer for already
    /// normalized inputs, propagating kept hidden columns between layers.
    pub fn pre_activations(&self, x: ArrayView2<T>) -> Result<Vec<Array2<T>>> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut input = x.to_owned();
        for layer in &self.layers {
            let pre = layer.pre_activation(input.view())?;
            let h = layer.hidden(input.view(), &self.hyperparams)?;
            input = crate::solvers::linalg::hstack(layer.kept(h.view()).view(), x);
            out.push(pre);
        }
        Ok(out)
    }
}
