//! Tabular data ingestion, normalization, label encoding and splitting.

mod labels;
mod manifest;
mod normalize;
mod split;
pub mod synthetic;
mod table;

use ndarray::{Array2, ArrayView2, Axis};

pub use labels::{encode_labels, LabelEncoding};
pub use manifest::{DatasetManifest, ManifestEntry};
pub use normalize::{zscore_apply, zscore_fit, ZScoreStats};
pub use split::{stratified_kfold, train_val_split, FoldPlan};
pub use table::{load_csv, read_csv, read_features, LabelColumn, RawTable};

use crate::{Error, Result, Scalar};

/// Raw (un-normalized) features with encoded labels: what the evaluation
/// protocol splits before any statistics are fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub label_names: Vec<String>,
}

impl Samples {
    pub fn new(features: Array2<f64>, labels: Vec<usize>, label_names: Vec<String>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: labels.len(),
            });
        }
        let k = label_names.len();
        if k < 2 {
            return Err(Error::SingleClass(label_names.first().cloned().unwrap_or_default()));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(Error::Parse {
                row: labels.iter().position(|&c| c == bad).unwrap_or(0),
                column: 0,
                message: format!("label index {bad} outside 0..{k}"),
            });
        }
        Ok(Samples {
            features,
            labels,
            k,
            label_names,
        })
    }

    pub fn from_table(raw: &RawTable) -> Result<Self> {
        let enc = encode_labels(raw)?;
        Samples::new(raw.features.clone(), enc.y, enc.label_names)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn subset(&self, indices: &[usize]) -> Samples {
        Samples {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            k: self.k,
            label_names: self.label_names.clone(),
        }
    }
}

/// One-hot target rows for labels in `0..k`.
pub fn one_hot<T: Scalar>(labels: &[usize], k: usize) -> Array2<T> {
    let mut y = Array2::zeros((labels.len(), k));
    for (i, &c) in labels.iter().enumerate() {
        y[[i, c]] = T::one();
    }
    y
}

/// Z-scored features with labels and one-hot targets, ready for training.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    pub x: Array2<T>,
    pub y: Vec<usize>,
    pub targets: Array2<T>,
    pub k: usize,
    pub label_names: Vec<String>,
    pub norm_stats: ZScoreStats,
}

impl<T: Scalar> Dataset<T> {
    /// Normalizes `samples` with statistics fitted on `samples` itself.
    pub fn fit(samples: &Samples) -> Self {
        let stats = zscore_fit(samples.features.view());
        Self::with_stats(samples, stats)
    }

    /// Normalizes `samples` with statistics fitted elsewhere.
    pub fn with_stats(samples: &Samples, norm_stats: ZScoreStats) -> Self {
        let x = zscore_apply(samples.features.view(), &norm_stats).mapv(T::from_f64_lossy);
        Dataset {
            x,
            y: samples.labels.clone(),
            targets: one_hot(&samples.labels, samples.k),
            k: samples.k,
            label_names: samples.label_names.clone(),
            norm_stats,
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Applies this dataset's normalization to raw features.
    pub fn normalize(&self, raw: ArrayView2<f64>) -> Result<Array2<T>> {
        if raw.ncols() != self.norm_stats.mean.len() {
            return Err(Error::dims(format!(
                "expected {} features, got {}",
                self.norm_stats.mean.len(),
                raw.ncols()
            )));
        }
        Ok(zscore_apply(raw, &self.norm_stats).mapv(T::from_f64_lossy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn one_hot_rows_sum_to_one() {
        let y: Array2<f64> = one_hot(&[2, 0, 1, 2], 3);
        assert_eq!(y.sum_axis(Axis(1)).to_vec(), vec![1.0; 4]);
        assert_eq!(y.row(0).to_vec(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn dataset_fit_normalizes_itself() {
        let s = Samples::new(
            array![[1.0, 10.0], [3.0, 10.0], [5.0, 10.0]],
            vec![0, 1, 0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let ds: Dataset<f64> = Dataset::fit(&s);
        let col = ds.x.column(0);
        assert!(col.mean().unwrap().abs() < 1e-12);
        assert!(ds.x.column(1).iter().all(|&v| v == 0.0));
        assert_eq!(ds.targets.dim(), (3, 2));
    }

    #[test]
    fn samples_reject_out_of_range_label() {
        let r = Samples::new(array![[1.0], [2.0]], vec![0, 2], vec!["a".into(), "b".into()]);
        assert!(r.is_err());
    }
}
