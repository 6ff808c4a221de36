use ndarray::{Array2, ArrayView2};

use super::{
    argmax_rows, init_layer_weights, neuron_importance, prune_mask, update_sample_weights, EnsembleModel,
    HyperParams, LayerModel, LayerOutputs,
};
use crate::dataset::Dataset;
use crate::solvers::linalg::hstack;
use crate::solvers::{RidgeProblem, SampleWeights};
use crate::{Error, Result, Scalar};

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct Trained<T> {
    pub model: EnsembleModel<T>,
    /// Per-layer scores and predicted labels on the training data.
    pub outputs: LayerOutputs<T>,
    /// The sample weights each layer's ridge solve used (all ones for the
    /// first layer and whenever weighting is disabled).
    pub sample_weights: Vec<SampleWeights>,
}

pub(crate) fn check_classes<T: Scalar>(ds: &Dataset<T>) -> Result<()> {
    let mut seen = vec![false; ds.k];
    for &c in &ds.y {
        if c >= ds.k {
            return Err(Error::dims(format!("label {c} outside 0..{}", ds.k)));
        }
        seen[c] = true;
    }
    match seen.iter().position(|&s| !s) {
        Some(c) => Err(Error::ClassAbsent(c)),
        None => Ok(()),
    }
}

/// Fresh layer `l` reading `d_in` inputs.
pub(crate) fn new_layer<T: Scalar>(d_in: usize, hp: &HyperParams, l: usize) -> LayerModel<T> {
    let (w, bias) = init_layer_weights(d_in, hp.n, hp.seed, l);
    LayerModel::new(w, hp.include_bias.then_some(bias))
}

pub(crate) fn correct_flags(pred: &[usize], truth: &[usize]) -> Vec<bool> {
    pred.iter().zip(truth).map(|(p, t)| p == t).collect()
}

/// Solves one layer's output weights. Layer 0 and unweighted runs use the
/// plain ridge system.
pub(crate) fn solve_layer<T: Scalar>(
    design: ArrayView2<T>,
    targets: ArrayView2<T>,
    lambda: T,
    weights: Option<&SampleWeights>,
) -> Result<Array2<T>> {
    match weights {
        Some(w) => RidgeProblem::weighted(design, targets, w)?.solve(lambda),
        None => RidgeProblem::auto(design, targets)?.solve(lambda),
    }
}

/// Trains an ensemble on normalized data.
///
/// Per layer: draw the hidden weights, fit batch-norm on the pre-activations,
/// solve the ridge system on `[H | X]` (weighted from the second layer on
/// when `omega_r < 1`), record the layer's predictions, update the sample
/// weights from them, and mask the `⌊p·n⌋` least important neurons out of
/// the next layer's input. The mask never touches the layer's own `β`.
pub fn train<T: Scalar>(ds: &Dataset<T>, hp: &HyperParams) -> Result<Trained<T>> {
    hp.validate()?;
    check_classes(ds)?;
    let m = ds.len();
    let lambda = T::from_f64_lossy(hp.lambda);

    let mut layers = Vec::with_capacity(hp.l_max);
    let mut outputs = LayerOutputs::default();
    let mut used_weights = Vec::with_capacity(hp.l_max);
    let mut weights = SampleWeights::ones(m);
    let mut input = ds.x.clone();

    for l in 0..hp.l_max {
        let mut layer = new_layer::<T>(input.ncols(), hp, l);
        let h = layer.fit_hidden(input.view(), hp)?;
        let design = hstack(h.view(), ds.x.view());

        let weighted = l > 0 && hp.weighting_enabled();
        let beta = solve_layer(design.view(), ds.targets.view(), lambda, weighted.then_some(&weights))?;
        let scores = design.dot(&beta);
        let labels = argmax_rows(scores.view());

        used_weights.push(if weighted { weights.clone() } else { SampleWeights::ones(m) });
        if hp.weighting_enabled() {
            weights = update_sample_weights(&correct_flags(&labels, &ds.y), hp.omega_r);
        }
        if hp.pruning_enabled() {
            let theta = neuron_importance(beta.view(), hp.n)?;
            layer.keep_mask = prune_mask(&theta, hp.p);
        }
        layer.beta = beta;
        input = hstack(layer.kept(h.view()).view(), ds.x.view());

        outputs.scores.push(scores);
        outputs.labels.push(labels);
        layers.push(layer);
    }

    Ok(Trained {
        model: EnsembleModel {
            hyperparams: hp.clone(),
            norm_stats: ds.norm_stats.clone(),
            label_names: ds.label_names.clone(),
            layers,
        },
        outputs,
        sample_weights: used_weights,
    })
}
