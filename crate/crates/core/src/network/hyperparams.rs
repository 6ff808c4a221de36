use serde::{Deserialize, Serialize};

use crate::solvers::{Activation, BatchNormParams, DEFAULT_EPSILON};
use crate::{Error, Result};

/// How per-layer outputs are combined into the ensemble prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Argmax of the mean of the raw per-layer scores.
    #[default]
    MeanScore,
    /// Most frequent per-layer argmax; ties go to the higher mean score,
    /// then the lower class index.
    MajorityVote,
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean_score" | "mean" => Ok(Aggregation::MeanScore),
            "majority_vote" | "vote" => Ok(Aggregation::MajorityVote),
            other => Err(format!("unknown aggregation {other:?} (expected mean_score or majority_vote)")),
        }
    }
}

pub const LAMBDA_MIN: f64 = 1.0 / 4096.0;
pub const LAMBDA_MAX: f64 = 4096.0;
pub const MAX_NEURONS: usize = 1000;
pub const MAX_LAYERS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    /// Ridge regularization shared by all layers, within `[2⁻¹², 2¹²]`.
    pub lambda: f64,
    /// Hidden neurons per layer.
    pub n: usize,
    pub l_max: usize,
    pub gamma: f64,
    pub alpha: f64,
    /// Weight of correctly classified samples; `1` disables weighting.
    pub omega_r: f64,
    /// Pruning rate; `0` disables pruning.
    pub p: f64,
    pub activation: Activation,
    pub aggregation: Aggregation,
    pub epsilon: f64,
    pub include_bias: bool,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            lambda: 1.0,
            n: 100,
            l_max: MAX_LAYERS,
            gamma: 1.0,
            alpha: 0.0,
            omega_r: 1.0,
            p: 0.0,
            activation: Activation::Relu,
            aggregation: Aggregation::MeanScore,
            epsilon: DEFAULT_EPSILON,
            include_bias: true,
            seed: 0,
        }
    }
}

fn bad(name: &'static str, message: String) -> Error {
    Error::InvalidHyperParam { name, message }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(LAMBDA_MIN..=LAMBDA_MAX).contains(&self.lambda) {
            return Err(bad("lambda", format!("{} outside [2^-12, 2^12]", self.lambda)));
        }
        if !(1..=MAX_NEURONS).contains(&self.n) {
            return Err(bad("n", format!("{} outside [1, {MAX_NEURONS}]", self.n)));
        }
        if !(1..=MAX_LAYERS).contains(&self.l_max) {
            return Err(bad("l_max", format!("{} outside [1, {MAX_LAYERS}]", self.l_max)));
        }
        if !self.gamma.is_finite() {
            return Err(bad("gamma", format!("{} is not finite", self.gamma)));
        }
        if !self.alpha.is_finite() {
            return Err(bad("alpha", format!("{} is not finite", self.alpha)));
        }
        if !(self.omega_r > 0.0 && self.omega_r <= 1.0) {
            return Err(bad("omega_r", format!("{} outside (0, 1]", self.omega_r)));
        }
        if !(self.p >= 0.0 && self.p < 1.0) {
            return Err(bad("p", format!("{} outside [0, 1)", self.p)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(bad("epsilon", format!("{} must be positive", self.epsilon)));
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn bn_params(&self) -> BatchNormParams {
        BatchNormParams {
            gamma: self.gamma,
            alpha: self.alpha,
        }
    }

    pub fn weighting_enabled(&self) -> bool {
        self.omega_r < 1.0
    }

    pub fn pruning_enabled(&self) -> bool {
        self.p > 0.0
    }

    /// Neurons pruned per layer: `⌊p·n⌋`, leaving at least one.
    pub fn pruned_per_layer(&self) -> usize {
        pruned_count(self.p, self.n)
    }
}

pub(crate) fn pruned_count(p: f64, n: usize) -> usize {
    // the small bias keeps products like 0.29·100 from flooring to 28
    let raw = (p * n as f64 + 1e-9).floor() as usize;
    raw.min(n.saturating_sub(1))
}
