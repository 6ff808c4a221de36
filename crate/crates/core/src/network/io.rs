use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{EnsembleModel, HyperParams, LayerModel};
use crate::dataset::ZScoreStats;
use crate::solvers::BatchNormStats;
use crate::{Error, Result, Scalar};

pub const MODEL_FORMAT_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: String,
    hyperparams: HyperParams,
    norm_stats: ZScoreStats,
    label_names: Vec<String>,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    bias_row: Option<Vec<f64>>,
    bn_stats: BnFile,
    keep_mask: Vec<bool>,
    beta: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BnFile {
    mu: Vec<f64>,
    sigma2: Vec<f64>,
    epsilon: f64,
}

fn rows<T: Scalar>(m: &Array2<T>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.iter().map(|v| v.to_f64_lossy()).collect()).collect()
}

fn vector<T: Scalar>(v: &Array1<T>) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

fn matrix<T: Scalar>(rows: Vec<Vec<f64>>, what: &str) -> Result<Array2<T>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(invalid(format!("{what} is not rectangular")));
    }
    let flat: Vec<T> = rows.into_iter().flatten().map(T::from_f64_lossy).collect();
    Ok(Array2::from_shape_vec((r, c), flat).expect("shape checked"))
}

impl<T: Scalar> EnsembleModel<T> {
    fn to_file(&self) -> Result<ModelFile> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let bn = l.bn_stats.as_ref().ok_or(Error::StatsNotFitted)?;
                Ok(LayerFile {
                    w: rows(&l.w),
                    bias_row: l.bias_row.as_ref().map(vector),
                    bn_stats: BnFile {
                        mu: vector(&bn.mu),
                        sigma2: vector(&bn.sigma2),
                        epsilon: bn.epsilon.to_f64_lossy(),
                    },
                    keep_mask: l.keep_mask.clone(),
                    beta: rows(&l.beta),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ModelFile {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            hyperparams: self.hyperparams.clone(),
            norm_stats: self.norm_stats.clone(),
            label_names: self.label_names.clone(),
            layers,
        })
    }

    fn from_file(file: ModelFile) -> Result<Self> {
        let d = file.norm_stats.mean.len();
        let k = file.label_names.len();
        if file.norm_stats.std.len() != d || d == 0 {
            return Err(invalid("norm_stats mean/std lengths differ or are empty"));
        }
        if k < 2 {
            return Err(invalid("fewer than two labels"));
        }
        if file.layers.is_empty() {
            return Err(invalid("model has no layers"));
        }
        let mut expected_inputs = d;
        let mut layers = Vec::with_capacity(file.layers.len());
        for (i, lf) in file.layers.into_iter().enumerate() {
            let w: Array2<T> = matrix(lf.w, "W")?;
            let n = w.ncols();
            if w.nrows() != expected_inputs || n == 0 {
                return Err(invalid(format!(
                    "layer {i}: W is {}x{n}, expected {expected_inputs} rows",
                    w.nrows()
                )));
            }
            if lf.keep_mask.len() != n || !lf.keep_mask.iter().any(|&k| k) {
                return Err(invalid(format!("layer {i}: keep_mask must have {n} entries with at least one kept")));
            }
            let bias_row = match lf.bias_row {
                Some(b) if b.len() == n => Some(Array1::from_iter(b.into_iter().map(T::from_f64_lossy))),
                Some(_) => return Err(invalid(format!("layer {i}: bias_row length differs from {n}"))),
                None => None,
            };
            if lf.bn_stats.mu.len() != n || lf.bn_stats.sigma2.len() != n || !(lf.bn_stats.epsilon > 0.0) {
                return Err(invalid(format!("layer {i}: malformed bn_stats")));
            }
            let beta: Array2<T> = matrix(lf.beta, "beta")?;
            if beta.dim() != (n + d, k) {
                return Err(invalid(format!(
                    "layer {i}: beta is {:?}, expected ({}, {k})",
                    beta.dim(),
                    n + d
                )));
            }
            let layer = LayerModel {
                w,
                bias_row,
                bn_stats: Some(BatchNormStats {
                    mu: lf.bn_stats.mu.into_iter().map(T::from_f64_lossy).collect(),
                    sigma2: lf.bn_stats.sigma2.into_iter().map(T::from_f64_lossy).collect(),
                    epsilon: T::from_f64_lossy(lf.bn_stats.epsilon),
                }),
                keep_mask: lf.keep_mask,
                beta,
            };
            expected_inputs = layer.n_kept() + d;
            layers.push(layer);
        }
        Ok(EnsembleModel {
            hyperparams: file.hyperparams,
            norm_stats: file.norm_stats,
            label_names: file.label_names,
            layers,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file()?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = match value.get("format_version") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(other) => other.to_string(),
            None => String::new(),
        };
        if found != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersionMismatch { found });
        }
        Self::from_file(serde_json::from_value(value)?)
    }
}

/// Writes the model as JSON, through a temporary file renamed into place so
/// a failed write never leaves a partial model behind.
pub fn save_model<T: Scalar>(model: &EnsembleModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = model.to_json()?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidConfig(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(json.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::file(path, e)
    })
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<EnsembleModel<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    EnsembleModel::from_json(&text)
}
