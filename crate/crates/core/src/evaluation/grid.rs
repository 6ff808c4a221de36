use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::network::HyperParams;
use crate::{Error, Result};

/// The four members of the network family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Re-normalized edRVFL without weighting or pruning.
    EdRvfl,
    WedRvfl,
    PedRvfl,
    WpedRvfl,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::EdRvfl, Variant::WedRvfl, Variant::PedRvfl, Variant::WpedRvfl];

    pub fn name(self) -> &'static str {
        match self {
            Variant::EdRvfl => "edrvfl",
            Variant::WedRvfl => "wedrvfl",
            Variant::PedRvfl => "pedrvfl",
            Variant::WpedRvfl => "wpedrvfl",
        }
    }

    pub fn weighting(self) -> bool {
        matches!(self, Variant::WedRvfl | Variant::WpedRvfl)
    }

    pub fn pruning(self) -> bool {
        matches!(self, Variant::PedRvfl | Variant::WpedRvfl)
    }

    /// Rejects hyperparameters that enable a mechanism this variant lacks.
    pub fn check(self, hp: &HyperParams) -> Result<()> {
        if !self.weighting() && hp.omega_r != 1.0 {
            return Err(Error::InvalidConfig(format!(
                "{} requires omega_r = 1, got {}",
                self.name(),
                hp.omega_r
            )));
        }
        if !self.pruning() && hp.p != 0.0 {
            return Err(Error::InvalidConfig(format!("{} requires p = 0, got {}", self.name(), hp.p)));
        }
        Ok(())
    }

    /// Pins the disabled mechanisms of this variant in `grid`.
    pub fn restrict(self, grid: &GridSpec) -> GridSpec {
        let mut g = grid.clone();
        if !self.weighting() {
            g.omega_r = vec![1.0];
        }
        if !self.pruning() {
            g.p = vec![0.0];
        }
        g
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "variant: unknown value {s:?} (expected edrvfl, wedrvfl, pedrvfl or wpedrvfl)"
                ))
            })
    }
}

/// Candidate values per hyperparameter. Settings outside the grid
/// (activation, aggregation, epsilon, bias) come from a base [`HyperParams`].
///
/// The default is the coarse desk-scale grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub lambda: Vec<f64>,
    pub n: Vec<usize>,
    pub l_max: Vec<usize>,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub omega_r: Vec<f64>,
    pub p: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lambda: [-6, -3, 0, 3, 6].iter().map(|&e| 2f64.powi(e)).collect(),
            n: vec![256, 512, 1000],
            l_max: vec![10],
            gamma: vec![1.0],
            alpha: vec![0.0],
            omega_r: vec![1.0, 0.75, 0.5],
            p: vec![0.0, 0.25, 0.5],
        }
    }
}

fn sorted_f64(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sorted_usize(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl GridSpec {
    /// A grid holding exactly the values of `hp`.
    pub fn single(hp: &HyperParams) -> Self {
        GridSpec {
            lambda: vec![hp.lambda],
            n: vec![hp.n],
            l_max: vec![hp.l_max],
            gamma: vec![hp.gamma],
            alpha: vec![hp.alpha],
            omega_r: vec![hp.omega_r],
            p: vec![hp.p],
        }
    }

    /// Every list non-empty and every value accepted by
    /// [`HyperParams::validate`].
    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("lambda", self.lambda.len()),
            ("n", self.n.len()),
            ("l_max", self.l_max.len()),
            ("gamma", self.gamma.len()),
            ("alpha", self.alpha.len()),
            ("omega_r", self.omega_r.len()),
            ("p", self.p.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, len)| *len == 0) {
            return Err(Error::InvalidConfig(format!("grid list {name} is empty")));
        }
        let base = HyperParams::default();
        for &lambda in &self.lambda {
            HyperParams { lambda, ..base.clone() }.validate()?;
        }
        for &n in &self.n {
            HyperParams { n, ..base.clone() }.validate()?;
        }
        for &l_max in &self.l_max {
            HyperParams { l_max, ..base.clone() }.validate()?;
        }
        for &gamma in &self.gamma {
            HyperParams { gamma, ..base.clone() }.validate()?;
        }
        for &alpha in &self.alpha {
            HyperParams { alpha, ..base.clone() }.validate()?;
        }
        for &omega_r in &self.omega_r {
            HyperParams { omega_r, ..base.clone() }.validate()?;
        }
        for &p in &self.p {
            HyperParams { p, ..base.clone() }.validate()?;
        }
        Ok(())
    }

    /// Number of distinct configurations.
    pub fn len(&self) -> usize {
        sorted_f64(&self.lambda).len()
            * sorted_usize(&self.n).len()
            * sorted_usize(&self.l_max).len()
            * sorted_f64(&self.gamma).len()
            * sorted_f64(&self.alpha).len()
            * sorted_f64(&self.omega_r).len()
            * sorted_f64(&self.p).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All configurations in selection order: each list sorted ascending and
    /// deduplicated, enumerated lexicographically with `lambda` outermost,
    /// then `n`, `l_max`, `gamma`, `alpha`, `omega_r`, `p`.
    pub fn points(&self, base: &HyperParams) -> Vec<HyperParams> {
        let mut out = Vec::with_capacity(self.len());
        for &lambda in &sorted_f64(&self.lambda) {
            for &n in &sorted_usize(&self.n) {
                for &l_max in &sorted_usize(&self.l_max) {
                    for &gamma in &sorted_f64(&self.gamma) {
                        for &alpha in &sorted_f64(&self.alpha) {
                            for &omega_r in &sorted_f64(&self.omega_r) {
                                for &p in &sorted_f64(&self.p) {
                                    out.push(HyperParams {
                                        lambda,
                                        n,
                                        l_max,
                                        gamma,
                                        alpha,
                                        omega_r,
                                        p,
                                        ..base.clone()
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
