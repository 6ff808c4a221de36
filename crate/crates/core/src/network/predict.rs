use ndarray::{Array2, ArrayView2, Axis};

use super::{Aggregation, EnsembleModel};
use crate::solvers::linalg::hstack;
use crate::{Error, Result, Scalar};

/// Raw per-layer scores `O_l = D_l·β_l` and their argmax labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerOutputs<T> {
    pub scores: Vec<Array2<T>>,
    pub labels: Vec<Vec<usize>>,
}

impl<T> Default for LayerOutputs<T> {
    fn default() -> Self {
        LayerOutputs {
            scores: Vec::new(),
            labels: Vec::new(),
        }
    }
}

impl<T> LayerOutputs<T> {
    pub fn depth(&self) -> usize {
        self.scores.len()
    }
}

/// Row-wise argmax; the lower class index wins ties.
pub fn argmax_rows<T: Scalar>(scores: ArrayView2<T>) -> Vec<usize> {
    scores
        .axis_iter(Axis(0))
        .map(|row| {
            let mut best = 0;
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Combines the first `depth` layers of `outputs`.
pub fn aggregate<T: Scalar>(outputs: &LayerOutputs<T>, depth: usize, how: Aggregation) -> Vec<usize> {
    let depth = depth.min(outputs.depth());
    if depth == 0 {
        return Vec::new();
    }
    let mut mean = outputs.scores[0].clone();
    for s in &outputs.scores[1..depth] {
        mean += s;
    }
    mean.mapv_inplace(|v| v / T::from_usize_lossy(depth));
    match how {
        Aggregation::MeanScore => argmax_rows(mean.view()),
        Aggregation::MajorityVote => {
            let k = mean.ncols();
            (0..mean.nrows())
                .map(|i| {
                    let mut votes = vec![0usize; k];
                    for labels in &outputs.labels[..depth] {
                        votes[labels[i]] += 1;
                    }
                    let mut best = 0;
                    for c in 1..k {
                        let better = votes[c] > votes[best]
                            || (votes[c] == votes[best] && mean[[i, c]] > mean[[i, best]]);
                        if better {
                            best = c;
                        }
                    }
                    best
                })
                .collect()
        }
    }
}

/// Per-layer outputs of the first `depth` layers for normalized inputs.
pub(crate) fn layer_outputs<T: Scalar>(model: &EnsembleModel<T>, x: ArrayView2<T>, depth: usize) -> Result<LayerOutputs<T>> {
    let mut out = LayerOutputs::default();
    let mut input = x.to_owned();
    for (l, layer) in model.layers.iter().take(depth).enumerate() {
        let h = layer.hidden(input.view(), &model.hyperparams)?;
        let design = hstack(h.view(), x);
        if design.ncols() != layer.beta.nrows() {
            return Err(Error::dims(format!(
                "layer {l} output weights expect {} features, design has {}",
                layer.beta.nrows(),
                design.ncols()
            )));
        }
        let scores = design.dot(&layer.beta);
        out.labels.push(argmax_rows(scores.view()));
        out.scores.push(scores);
        if l + 1 < depth {
            input = hstack(layer.kept(h.view()).view(), x);
        }
    }
    Ok(out)
}

/// Predicts class indices for raw (un-normalized) feature rows; the model's
/// stored input statistics are applied first.
pub fn predict<T: Scalar>(model: &EnsembleModel<T>, x: ArrayView2<f64>) -> Result<(Vec<usize>, LayerOutputs<T>)> {
    let xn = model.normalize(x)?;
    let outputs = layer_outputs(model, xn.view(), model.depth())?;
    let labels = aggregate(&outputs, model.depth(), model.hyperparams.aggregation);
    Ok((labels, outputs))
}

/// Ensemble prediction using only the first `depth` layers.
pub fn predict_prefix<T: Scalar>(model: &EnsembleModel<T>, x: ArrayView2<f64>, depth: usize) -> Result<Vec<usize>> {
    if depth == 0 || depth > model.depth() {
        return Err(Error::DepthOutOfRange {
            depth,
            layers: model.depth(),
        });
    }
    let xn = model.normalize(x)?;
    let outputs = layer_outputs(model, xn.view(), depth)?;
    Ok(aggregate(&outputs, depth, model.hyperparams.aggregation))
}
