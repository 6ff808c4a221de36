//! Closed-form solvers, activations and batch-norm statistics shared by every
//! network variant.

mod activation;
pub(crate) mod batchnorm;
pub(crate) mod linalg;
mod ridge;

pub use activation::{apply_activation, apply_activation_inplace, Activation};
pub use batchnorm::{batch_norm_apply, batch_norm_fit, BatchNormParams, BatchNormStats, DEFAULT_EPSILON};
pub use ridge::{
    solve_pseudoinverse, solve_ridge_auto, solve_ridge_dual, solve_ridge_primal,
    solve_weighted_ridge, RidgeProblem, SampleWeights,
};
