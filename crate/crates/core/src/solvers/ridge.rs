use ndarray::{Array2, ArrayView2, Axis, CowArray, Ix2};
use serde::{Deserialize, Serialize};

use super::linalg::{gram, jacobi_svd, Cholesky};
use crate::{Error, Result, Scalar};

/// Per-sample weights of a weighted ridge solve: the diagonal of `W*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    pub fn new(w: Vec<f64>) -> Self {
        SampleWeights(w)
    }

    pub fn ones(m: usize) -> Self {
        SampleWeights(vec![1.0; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

enum Form<'a, T: Scalar> {
    /// `DᵀD` and `DᵀY`.
    Primal { gram: Array2<T>, rhs: Array2<T> },
    /// `DDᵀ`, with `D` and `Y` kept for the back-projection.
    Dual {
        design: CowArray<'a, T, Ix2>,
        kernel: Array2<T>,
        targets: CowArray<'a, T, Ix2>,
    },
}

/// A ridge system whose Gram (or kernel) matrix has been formed once and can
/// be solved for any number of regularization values.
pub struct RidgeProblem<'a, T: Scalar> {
    form: Form<'a, T>,
    outputs: usize,
}

fn check_inputs<T: Scalar>(d: &ArrayView2<T>, y: &ArrayView2<T>) -> Result<()> {
    if d.nrows() != y.nrows() {
        return Err(Error::dims(format!(
            "design has {} rows but targets have {}",
            d.nrows(),
            y.nrows()
        )));
    }
    if d.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !d.iter().chain(y.iter()).all(|v| v.is_finite()) {
        return Err(Error::InvalidConfig("design or target matrix has non-finite entries".into()));
    }
    Ok(())
}

impl<'a, T: Scalar> RidgeProblem<'a, T> {
    /// Primal form: factors the `p × p` Gram matrix.
    pub fn primal(d: ArrayView2<'a, T>, y: ArrayView2<'a, T>) -> Result<Self> {
        check_inputs(&d, &y)?;
        Ok(Self::primal_unchecked(d, y))
    }

    fn primal_unchecked(d: ArrayView2<T>, y: ArrayView2<T>) -> Self {
        RidgeProblem {
            form: Form::Primal {
                gram: gram(d),
                rhs: d.t().dot(&y),
            },
            outputs: y.ncols(),
        }
    }

    /// Dual form: factors the `m × m` kernel matrix.
    pub fn dual(d: ArrayView2<'a, T>, y: ArrayView2<'a, T>) -> Result<Self> {
        check_inputs(&d, &y)?;
        Ok(Self::dual_from(d.into(), y.into()))
    }

    fn dual_from(design: CowArray<'a, T, Ix2>, targets: CowArray<'a, T, Ix2>) -> Self {
        let kernel = gram(design.t());
        let outputs = targets.ncols();
        RidgeProblem {
            form: Form::Dual {
                design,
                kernel,
                targets,
            },
            outputs,
        }
    }

    /// Primal when `columns ≤ rows`, dual otherwise.
    pub fn auto(d: ArrayView2<'a, T>, y: ArrayView2<'a, T>) -> Result<Self> {
        if d.ncols() <= d.nrows() {
            Self::primal(d, y)
        } else {
            Self::dual(d, y)
        }
    }

    /// Weighted system `min Σ wᵢ‖dᵢβ − yᵢ‖² + λ‖β‖²`.
    ///
    /// Rows of `D` and `Y` are scaled by `√wᵢ`, which turns both the primal
    /// `(DᵀW D + λI)⁻¹DᵀW Y` and the dual `Dᵀ(W DDᵀ + λI)⁻¹W Y` into the
    /// unweighted forms on the scaled data; the dual becomes symmetric so
    /// it can be Cholesky-factored.
    pub fn weighted(d: ArrayView2<T>, y: ArrayView2<T>, w: &SampleWeights) -> Result<RidgeProblem<'static, T>> {
        check_inputs(&d, &y)?;
        if w.len() != d.nrows() {
            return Err(Error::dims(format!(
                "{} sample weights for {} rows",
                w.len(),
                d.nrows()
            )));
        }
        if let Some((index, &value)) = w.as_slice().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeWeight { index, value });
        }
        let scale = |m: ArrayView2<T>| {
            let mut out = m.to_owned();
            for (mut row, wi) in out.axis_iter_mut(Axis(0)).zip(w.as_slice()) {
                let s = T::from_f64_lossy(wi.sqrt());
                row.mapv_inplace(|v| v * s);
            }
            out
        };
        let (ds, ys) = (scale(d), scale(y));
        Ok(if ds.ncols() <= ds.nrows() {
            RidgeProblem::primal_unchecked(ds.view(), ys.view())
        } else {
            RidgeProblem::dual_from(ds.into(), ys.into())
        })
    }

    pub fn is_primal(&self) -> bool {
        matches!(self.form, Form::Primal { .. })
    }

    /// Output weights for one regularization value.
    pub fn solve(&self, lambda: T) -> Result<Array2<T>> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidHyperParam {
                name: "lambda",
                message: format!("must be a finite non-negative number, got {lambda}"),
            });
        }
        let beta = match &self.form {
            Form::Primal { gram, rhs } => Cholesky::factor_shifted(gram.view(), lambda)?.solve(rhs.view()),
            Form::Dual {
                design,
                kernel,
                targets,
            } => {
                let alpha = Cholesky::factor_shifted(kernel.view(), lambda)?.solve(targets.view());
                design.t().dot(&alpha)
            }
        };
        debug_assert_eq!(beta.ncols(), self.outputs);
        Ok(beta)
    }
}

/// `β = (DᵀD + λI)⁻¹DᵀY`.
pub fn solve_ridge_primal<T: Scalar>(d: ArrayView2<T>, y: ArrayView2<T>, lambda: T) -> Result<Array2<T>> {
    RidgeProblem::primal(d, y)?.solve(lambda)
}

/// `β = Dᵀ(DDᵀ + λI)⁻¹Y`.
pub fn solve_ridge_dual<T: Scalar>(d: ArrayView2<T>, y: ArrayView2<T>, lambda: T) -> Result<Array2<T>> {
    RidgeProblem::dual(d, y)?.solve(lambda)
}

/// Picks the primal form when the design has no more columns than rows
/// (ties go to primal) and the dual form otherwise.
pub fn solve_ridge_auto<T: Scalar>(d: ArrayView2<T>, y: ArrayView2<T>, lambda: T) -> Result<Array2<T>> {
    RidgeProblem::auto(d, y)?.solve(lambda)
}

pub fn solve_weighted_ridge<T: Scalar>(
    d: ArrayView2<T>,
    y: ArrayView2<T>,
    lambda: T,
    w: &SampleWeights,
) -> Result<Array2<T>> {
    RidgeProblem::weighted(d, y, w)?.solve(lambda)
}

/// Minimum-norm least-squares solution `β = D⁺Y`.
///
/// Singular values below `max(m, p)·ε·σ_max` are treated as zero.
pub fn solve_pseudoinverse<T: Scalar>(d: ArrayView2<T>, y: ArrayView2<T>) -> Result<Array2<T>> {
    check_inputs(&d, &y)?;
    let (m, p) = d.dim();
    let k = y.ncols();
    let tall = m >= p;
    // Jacobi works on the tall orientation: a = us·vᵀ.
    let (us, v) = if tall { jacobi_svd(d) } else { jacobi_svd(d.t()) };
    let sigma2: Vec<T> = us.axis_iter(Axis(1)).map(|c| c.dot(&c)).collect();
    let smax = sigma2.iter().fold(T::zero(), |a, &b| a.max(b)).sqrt();
    let cutoff = T::from_usize_lossy(m.max(p)) * T::epsilon() * smax;
    let mut beta = Array2::<T>::zeros((p, k));
    for (i, &s2) in sigma2.iter().enumerate() {
        if s2.sqrt() <= cutoff || s2 == T::zero() {
            continue;
        }
        let us_i = us.column(i);
        let v_i = v.column(i);
        if tall {
            // D = U Σ Vᵀ: D⁺Y = Σᵢ vᵢ (uᵢσᵢ)ᵀY / σᵢ²
            let coeff = us_i.dot(&y) / s2;
            for r in 0..p {
                for c in 0..k {
                    beta[[r, c]] = beta[[r, c]] + v_i[r] * coeff[c];
                }
            }
        } else {
            // Dᵀ = U' Σ V'ᵀ: D⁺Y = Σᵢ (u'ᵢσᵢ) v'ᵢᵀY / σᵢ²
            let coeff = v_i.dot(&y) / s2;
            for r in 0..p {
                for c in 0..k {
                    beta[[r, c]] = beta[[r, c]] + us_i[r] * coeff[c];
                }
            }
        }
    }
    Ok(beta)
}
