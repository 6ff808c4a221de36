use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, Variant};
use super::metrics::{accuracy, mean_std};
use crate::dataset::{stratified_kfold, train_val_split, Dataset, FoldPlan, Samples};
use crate::network::{predict, train, train_lambda_path, HyperParams};
use crate::{Error, Result};

/// Outer cross-validation and inner validation split settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Protocol {
    pub folds: usize,
    /// Share of each fold's training part held out for grid selection.
    pub val_fraction: f64,
    /// Seed of the fold partition and the inner splits. Repetitions keep it
    /// fixed and vary only the hidden-weight seed.
    pub split_seed: u64,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            folds: 4,
            val_fraction: 0.25,
            split_seed: 0,
        }
    }
}

impl Protocol {
    pub fn fold_plan(&self, labels: &[usize]) -> Result<FoldPlan> {
        stratified_kfold(labels, self.folds, self.split_seed)
    }

    fn inner_seed(&self, fold: usize) -> u64 {
        self.split_seed.wrapping_add(1 + fold as u64)
    }
}

/// Outcome of one or more cross-validation runs of one variant on one
/// dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub dataset: String,
    pub variant: Variant,
    /// Hidden-weight seeds, one per repetition.
    pub seeds: Vec<u64>,
    pub split_seed: u64,
    /// `fold_accuracies[r][f]`: test accuracy of fold `f` in repetition `r`.
    pub fold_accuracies: Vec<Vec<f64>>,
    pub seed_means: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `seed_means`.
    pub std: f64,
    /// Configuration selected in each repetition.
    pub chosen: Vec<HyperParams>,
    /// Kept out of the serialized form so result files stay reproducible.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunResult {
    fn merge(runs: Vec<RunResult>) -> Result<RunResult> {
        let first = runs.first().ok_or_else(|| Error::InvalidConfig("no runs to merge".into()))?;
        let mut out = RunResult {
            dataset: first.dataset.clone(),
            variant: first.variant,
            split_seed: first.split_seed,
            seeds: Vec::new(),
            fold_accuracies: Vec::new(),
            seed_means: Vec::new(),
            mean: 0.0,
            std: 0.0,
            chosen: Vec::new(),
            wall_clock_seconds: 0.0,
        };
        for r in runs {
            out.seeds.extend(r.seeds);
            out.fold_accuracies.extend(r.fold_accuracies);
            out.seed_means.extend(r.seed_means);
            out.chosen.extend(r.chosen);
            out.wall_clock_seconds += r.wall_clock_seconds;
        }
        (out.mean, out.std) = mean_std(&out.seed_means);
        Ok(out)
    }

    /// One JSON object without a trailing newline.
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses a JSON-lines file body, skipping blank lines.
    pub fn parse_jsonl(text: &str) -> Result<Vec<RunResult>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect()
    }
}

/// One dataset and variant under a fixed grid and protocol.
#[derive(Debug, Clone, Copy)]
pub struct Experiment<'a> {
    pub name: &'a str,
    pub samples: &'a Samples,
    pub variant: Variant,
    pub grid: &'a GridSpec,
    /// Source of the settings the grid does not cover.
    pub base: &'a HyperParams,
    pub protocol: &'a Protocol,
}

/// Trains on `fit` and returns the test accuracy, normalizing with
/// statistics of the training rows only.
fn fit_and_score(samples: &Samples, fit: &[usize], test: &[usize], hp: &HyperParams) -> Result<f64> {
    let ds: Dataset<f64> = Dataset::fit(&samples.subset(fit));
    let trained = train(&ds, hp)?;
    let test_samples = samples.subset(test);
    let (pred, _) = predict(&trained.model, test_samples.features.view())?;
    accuracy(&pred, &test_samples.labels)
}

/// Plain k-fold cross-validation of one configuration: the test accuracy of
/// every fold, in fold order.
pub fn cross_validate(samples: &Samples, hp: &HyperParams, plan: &FoldPlan) -> Result<Vec<f64>> {
    hp.validate()?;
    plan.folds
        .par_iter()
        .map(|(fit, test)| fit_and_score(samples, fit, test, hp))
        .collect()
}

/// Grid points that differ only in `lambda` and can share a lambda path.
fn lambda_groups(points: &[HyperParams]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(HyperParams, Vec<usize>)> = Vec::new();
    for (i, hp) in points.iter().enumerate() {
        let key = HyperParams { lambda: 1.0, ..hp.clone() };
        match groups.iter_mut().find(|(k, _)| hp.p == 0.0 && *k == key) {
            Some((_, members)) => members.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    groups.into_iter().map(|(_, members)| members).collect()
}

/// Validation accuracy of each point of `group` on one inner split.
fn score_group(
    ds: &Dataset<f64>,
    val: &Samples,
    points: &[HyperParams],
    group: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if group.len() > 1 {
        let lambdas: Vec<f64> = group.iter().map(|&i| points[i].lambda).collect();
        let path = train_lambda_path(ds, &points[group[0]], &lambdas)?;
        let preds = path.predict_all(val.features.view())?;
        return group
            .iter()
            .zip(preds)
            .map(|(&i, pred)| Ok((i, accuracy(&pred, &val.labels)?)))
            .collect();
    }
    let i = group[0];
    let trained = train(ds, &points[i])?;
    let (pred, _) = predict(&trained.model, val.features.view())?;
    Ok(vec![(i, accuracy(&pred, &val.labels)?)])
}

/// Index of the first point with the best mean validation accuracy.
fn select(val_acc: &[Vec<f64>]) -> usize {
    let folds = val_acc.len() as f64;
    let means: Vec<f64> = (0..val_acc[0].len())
        .map(|g| val_acc.iter().map(|row| row[g]).sum::<f64>() / folds)
        .collect();
    let mut best = 0;
    for (g, &m) in means.iter().enumerate() {
        if m > means[best] {
            best = g;
        }
    }
    best
}

/// Cross-validated grid search with hidden-weight seed `seed`.
///
/// Each outer fold's training part is split into fit and validation rows;
/// every grid point is scored on validation in every fold and the point with
/// the best mean validation accuracy (first in grid order on ties) is
/// selected once for the dataset. It is then retrained on each full
/// fold-training part and scored on the fold's test rows.
///
/// The grid is first restricted to the variant, so one grid can serve all
/// four variants.
pub fn run_cv(exp: &Experiment<'_>, seed: u64) -> Result<RunResult> {
    let started = Instant::now();
    let grid = exp.variant.restrict(exp.grid);
    grid.validate()?;
    let base = HyperParams { seed, ..exp.base.clone() };
    let points = grid.points(&base);
    let plan = exp.protocol.fold_plan(&exp.samples.labels)?;

    let chosen = if points.len() == 1 {
        points[0].clone()
    } else {
        let splits: Vec<(Dataset<f64>, Samples)> = plan
            .folds
            .iter()
            .enumerate()
            .map(|(f, (train_idx, _))| {
                let (fit, val) = train_val_split(
                    train_idx,
                    &exp.samples.labels,
                    exp.protocol.val_fraction,
                    exp.protocol.inner_seed(f),
                )?;
                Ok((Dataset::fit(&exp.samples.subset(&fit)), exp.samples.subset(&val)))
            })
            .collect::<Result<_>>()?;
        let groups = lambda_groups(&points);
        let jobs: Vec<(usize, &Vec<usize>)> =
            (0..splits.len()).flat_map(|f| groups.iter().map(move |g| (f, g))).collect();
        let scored: Vec<(usize, Vec<(usize, f64)>)> = jobs
            .par_iter()
            .map(|&(f, g)| Ok((f, score_group(&splits[f].0, &splits[f].1, &points, g)?)))
            .collect::<Result<_>>()?;
        let mut val_acc = vec![vec![0.0; points.len()]; splits.len()];
        for (f, accs) in scored {
            for (i, a) in accs {
                val_acc[f][i] = a;
            }
        }
        points[select(&val_acc)].clone()
    };

    let fold_acc = cross_validate(exp.samples, &chosen, &plan)?;
    let (mean, _) = mean_std(&fold_acc);
    log::info!(
        "{} {} seed {}: {:.4} (lambda {}, n {}, omega_r {}, p {})",
        exp.name,
        exp.variant,
        seed,
        mean,
        chosen.lambda,
        chosen.n,
        chosen.omega_r,
        chosen.p
    );
    Ok(RunResult {
        dataset: exp.name.to_string(),
        variant: exp.variant,
        seeds: vec![seed],
        split_seed: exp.protocol.split_seed,
        fold_accuracies: vec![fold_acc],
        seed_means: vec![mean],
        mean,
        std: 0.0,
        chosen: vec![chosen],
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// [`run_cv`] for seeds `base_seed..base_seed + repetitions` over one fixed
/// fold partition; reports the mean and population std of the per-seed means.
pub fn repeat_runs(exp: &Experiment<'_>, repetitions: usize, base_seed: u64) -> Result<RunResult> {
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }
    let runs = (0..repetitions as u64)
        .into_par_iter()
        .map(|r| run_cv(exp, base_seed.wrapping_add(r)))
        .collect::<Result<Vec<_>>>()?;
    RunResult::merge(runs)
}

/// Hyperparameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    OmegaR,
    P,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::OmegaR => "omega_r",
            SweepParam::P => "p",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_r" => Ok(SweepParam::OmegaR),
            "p" => Ok(SweepParam::P),
            _ => Err(Error::InvalidConfig(format!(
                "parameter: unknown value {s:?} (expected omega_r or p)"
            ))),
        }
    }
}

/// Mean k-fold test accuracy of `fixed` with `param` set to each of
/// `values`. Sweeping `omega_r` requires `p = 0`; sweeping `p` requires
/// `omega_r = 1`.
pub fn sweep(
    samples: &Samples,
    param: SweepParam,
    values: &[f64],
    fixed: &HyperParams,
    protocol: &Protocol,
) -> Result<Vec<(f64, f64)>> {
    match param {
        SweepParam::OmegaR if fixed.p != 0.0 => {
            return Err(Error::InvalidConfig(format!("sweeping omega_r requires p = 0, got {}", fixed.p)))
        }
        SweepParam::P if fixed.omega_r != 1.0 => {
            return Err(Error::InvalidConfig(format!(
                "sweeping p requires omega_r = 1, got {}",
                fixed.omega_r
            )))
        }
        _ => {}
    }
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    let plan = protocol.fold_plan(&samples.labels)?;
    values
        .iter()
        .map(|&v| {
            let hp = match param {
                SweepParam::OmegaR => HyperParams { omega_r: v, ..fixed.clone() },
                SweepParam::P => HyperParams { p: v, ..fixed.clone() },
            };
            let acc = cross_validate(samples, &hp, &plan)?;
            Ok((v, mean_std(&acc).0))
        })
        .collect()
}
