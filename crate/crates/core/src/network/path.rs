use ndarray::{Array2, ArrayView2};

use super::predict::argmax_rows;
use super::train::{check_classes, correct_flags, new_layer, solve_layer};
use super::{aggregate, update_sample_weights, EnsembleModel, HyperParams, LayerModel, LayerOutputs};
use crate::dataset::Dataset;
use crate::solvers::linalg::hstack;
use crate::solvers::{RidgeProblem, SampleWeights};
use crate::{Error, Result, Scalar};

/// Models for several regularization values that share their hidden layers.
///
/// Without pruning the hidden features never depend on `β`, so one pass
/// through the layers serves every `λ`: unweighted layers factor a single
/// Gram matrix, weighted layers keep one weight vector per `λ`.
#[derive(Debug, Clone)]
pub struct LambdaPath<T> {
    pub lambdas: Vec<f64>,
    hyperparams: HyperParams,
    norm_stats: crate::dataset::ZScoreStats,
    label_names: Vec<String>,
    /// Hidden layers with empty `beta`.
    layers: Vec<LayerModel<T>>,
    /// `betas[i][l]`: output weights of layer `l` for `lambdas[i]`.
    betas: Vec<Vec<Array2<T>>>,
}

/// Trains `hp` once for every value in `lambdas`. Requires `hp.p == 0`.
///
/// `model(i)` is bitwise identical to `train` with `lambda = lambdas[i]`.
pub fn train_lambda_path<T: Scalar>(ds: &Dataset<T>, hp: &HyperParams, lambdas: &[f64]) -> Result<LambdaPath<T>> {
    if hp.pruning_enabled() {
        return Err(Error::InvalidConfig("lambda paths require p = 0".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidConfig("empty lambda list".into()));
    }
    for &lambda in lambdas {
        HyperParams { lambda, ..hp.clone() }.validate()?;
    }
    check_classes(ds)?;
    let m = ds.len();
    let lams: Vec<T> = lambdas.iter().map(|&l| T::from_f64_lossy(l)).collect();

    let mut layers = Vec::with_capacity(hp.l_max);
    let mut betas: Vec<Vec<Array2<T>>> = vec![Vec::with_capacity(hp.l_max); lambdas.len()];
    let mut weights: Vec<SampleWeights> = vec![SampleWeights::ones(m); lambdas.len()];
    let mut input = ds.x.clone();

    for l in 0..hp.l_max {
        let mut layer = new_layer::<T>(input.ncols(), hp, l);
        let h = layer.fit_hidden(input.view(), hp)?;
        let design = hstack(h.view(), ds.x.view());
        let weighted = l > 0 && hp.weighting_enabled();

        let solved: Vec<Array2<T>> = if weighted {
            lams.iter()
                .zip(&weights)
                .map(|(&lam, w)| solve_layer(design.view(), ds.targets.view(), lam, Some(w)))
                .collect::<Result<_>>()?
        } else {
            let problem = RidgeProblem::auto(design.view(), ds.targets.view())?;
            lams.iter().map(|&lam| problem.solve(lam)).collect::<Result<_>>()?
        };

        if hp.weighting_enabled() {
            for (w, beta) in weights.iter_mut().zip(&solved) {
                let labels = argmax_rows(design.dot(beta).view());
                *w = update_sample_weights(&correct_flags(&labels, &ds.y), hp.omega_r);
            }
        }
        for (per_lambda, beta) in betas.iter_mut().zip(solved) {
            per_lambda.push(beta);
        }
        input = hstack(h.view(), ds.x.view());
        layers.push(layer);
    }

    Ok(LambdaPath {
        lambdas: lambdas.to_vec(),
        hyperparams: hp.clone(),
        norm_stats: ds.norm_stats.clone(),
        label_names: ds.label_names.clone(),
        layers,
        betas,
    })
}

impl<T: Scalar> LambdaPath<T> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn model(&self, i: usize) -> EnsembleModel<T> {
        let layers = self
            .layers
            .iter()
            .zip(&self.betas[i])
            .map(|(layer, beta)| LayerModel {
                beta: beta.clone(),
                ..layer.clone()
            })
            .collect();
        EnsembleModel {
            hyperparams: HyperParams {
                lambda: self.lambdas[i],
                ..self.hyperparams.clone()
            },
            norm_stats: self.norm_stats.clone(),
            label_names: self.label_names.clone(),
            layers,
        }
    }

    /// Ensemble labels for raw feature rows, one vector per `λ`, computing
    /// the shared hidden features once.
    pub fn predict_all(&self, x: ArrayView2<f64>) -> Result<Vec<Vec<usize>>> {
        let d = self.norm_stats.mean.len();
        if x.ncols() != d {
            return Err(Error::dims(format!("model expects {d} features, got {}", x.ncols())));
        }
        let xn: Array2<T> = crate::dataset::zscore_apply(x, &self.norm_stats).mapv(T::from_f64_lossy);
        let mut outputs: Vec<LayerOutputs<T>> = vec![LayerOutputs::default(); self.len()];
        let mut input = xn.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let h = layer.hidden(input.view(), &self.hyperparams)?;
            let design = hstack(h.view(), xn.view());
            for (out, betas) in outputs.iter_mut().zip(&self.betas) {
                let scores = design.dot(&betas[l]);
                out.labels.push(argmax_rows(scores.view()));
                out.scores.push(scores);
            }
            input = design;
        }
        Ok(outputs
            .iter()
            .map(|o| aggregate(o, o.depth(), self.hyperparams.aggregation))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synthetic;
    use crate::network::{predict, train};

    #[test]
    fn path_models_equal_individual_training() {
        let samples = synthetic::gaussian_blobs(120, 6, 3, 1.5, 5);
        let ds: Dataset<f64> = Dataset::fit(&samples);
        let lambdas = [0.125, 1.0, 16.0];
        for omega_r in [1.0, 0.7] {
            let hp = HyperParams { n: 30, l_max: 4, omega_r, seed: 9, ..Default::default() };
            let path = train_lambda_path(&ds, &hp, &lambdas).unwrap();
            let all = path.predict_all(samples.features.view()).unwrap();
            for (i, &lambda) in lambdas.iter().enumerate() {
                let direct = train(&ds, &HyperParams { lambda, ..hp.clone() }).unwrap().model;
                assert_eq!(path.model(i), direct);
                let (labels, _) = predict(&direct, samples.features.view()).unwrap();
                assert_eq!(all[i], labels);
            }
        }
    }

    #[test]
    fn pruning_rejected() {
        let ds: Dataset<f64> = Dataset::fit(&synthetic::gaussian_blobs(40, 3, 2, 1.0, 1));
        let hp = HyperParams { p: 0.2, ..Default::default() };
        assert!(train_lambda_path(&ds, &hp, &[1.0]).is_err());
    }
}
