//! Ensemble deep random vector functional link (edRVFL) networks for tabular
//! classification.
//!
//! The crate covers the whole pipeline: closed-form ridge solvers
//! ([`solvers`]), CSV ingestion and stratified splitting ([`dataset`]), the
//! network family itself with batch re-normalization, per-sample weighting
//! and neuron pruning ([`network`]), and the cross-validation / comparison
//! protocol ([`evaluation`]).
//!
//! Numerical code is generic over the floating point type through [`Scalar`];
//! the aliases at the crate root fix it to `f64`, which is what the model
//! files store.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod network;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use dataset::{FoldPlan, LabelColumn, RawTable, Samples, ZScoreStats};
pub use evaluation::{ComparisonReport, GridSpec, Protocol, RunResult, Variant};
pub use network::{Activation, Aggregation, HyperParams};
pub use solvers::{BatchNormParams, SampleWeights};

/// Normalized training data in double precision.
pub type Dataset = dataset::Dataset<f64>;
/// Single precision variant of [`Dataset`].
pub type Dataset32 = dataset::Dataset<f32>;
/// A trained ensemble in double precision.
pub type EnsembleModel = network::EnsembleModel<f64>;
/// Single precision variant of [`EnsembleModel`].
pub type EnsembleModel32 = network::EnsembleModel<f32>;
pub type LayerModel = network::LayerModel<f64>;
pub type LayerOutputs = network::LayerOutputs<f64>;
pub type BatchNormStats = solvers::BatchNormStats<f64>;
