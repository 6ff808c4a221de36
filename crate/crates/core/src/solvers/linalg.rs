use ndarray::{s, Array2, ArrayView2, Axis};

use crate::{Error, Result, Scalar};

const GRAM_BLOCK: usize = 96;

/// `aᵀa` for a tall matrix. Only the upper triangle is computed through the
/// matrix product and then mirrored, so the result is exactly symmetric.
pub(crate) fn gram<T: Scalar>(a: ArrayView2<T>) -> Array2<T> {
    let p = a.ncols();
    let mut g = Array2::<T>::zeros((p, p));
    let mut start = 0;
    while start < p {
        let end = (start + GRAM_BLOCK).min(p);
        let block = a.slice(s![.., start..end]);
        let upper = a.slice(s![.., ..end]).t().dot(&block);
        g.slice_mut(s![..end, start..end]).assign(&upper);
        start = end;
    }
    for i in 0..p {
        for j in 0..i {
            g[[i, j]] = g[[j, i]];
        }
    }
    g
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] = acc[0] + a[i] * b[i];
        acc[1] = acc[1] + a[i + 1] * b[i + 1];
        acc[2] = acc[2] + a[i + 2] * b[i + 2];
        acc[3] = acc[3] + a[i + 3] * b[i + 3];
    }
    let mut tail = T::zero();
    for i in chunks * 4..a.len() {
        tail = tail + a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower Cholesky factor of a symmetric positive-definite matrix, stored
/// row-major in a dense buffer.
pub(crate) struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors `a + shift·I`. Fails with [`Error::SingularSystem`] when a pivot
    /// falls below `n·ε·max(diag)`.
    pub(crate) fn factor_shifted(a: ArrayView2<T>, shift: T) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::dims(format!("cholesky of {}x{} matrix", n, a.ncols())));
        }
        let mut l = vec![T::zero(); n * n];
        let max_diag = (0..n)
            .map(|i| (a[[i, i]] + shift).abs())
            .fold(T::zero(), T::max);
        let tol = T::epsilon() * T::from_usize_lossy(n.max(1)) * max_diag;
        for j in 0..n {
            let row_j = &l[j * n..j * n + j];
            let d = a[[j, j]] + shift - dot(row_j, row_j);
            if !(d > tol) || !d.is_finite() {
                return Err(Error::SingularSystem);
            }
            let pivot = d.sqrt();
            l[j * n + j] = pivot;
            for i in j + 1..n {
                let (head, tail) = l.split_at_mut(i * n);
                let row_j = &head[j * n..j * n + j];
                let row_i = &mut tail[..=j];
                row_i[j] = (a[[i, j]] - dot(&row_i[..j], row_j)) / pivot;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solves `(LLᵀ) x = b` column by column.
    pub(crate) fn solve(&self, b: ArrayView2<T>) -> Array2<T> {
        let n = self.n;
        let k = b.ncols();
        // work column-major so each right-hand side is contiguous
        let mut x = b.t().as_standard_layout().into_owned();
        for c in 0..k {
            let mut col = x.row_mut(c);
            let col = col.as_slice_mut().expect("standard layout rows are contiguous");
            for i in 0..n {
                let row = &self.l[i * n..i * n + i];
                col[i] = (col[i] - dot(row, &col[..i])) / self.l[i * n + i];
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in i + 1..n {
                    s = s - self.l[j * n + i] * col[j];
                }
                col[i] = s / self.l[i * n + i];
            }
        }
        x.reversed_axes().as_standard_layout().to_owned()
    }
}

/// Thin singular value decomposition by one-sided Jacobi rotations.
///
/// For `a` of shape `m × p` with `m ≥ p` returns `(us, v)` where the columns
/// of `us` are `uᵢσᵢ` and `v` is orthogonal (`p × p`), so `a = us·vᵀ`.
pub(crate) fn jacobi_svd<T: Scalar>(a: ArrayView2<T>) -> (Array2<T>, Array2<T>) {
    let p = a.ncols();
    // columns stored as rows for contiguous access
    let mut cols = a.t().to_owned();
    let mut v = Array2::<T>::eye(p);
    let tol = T::epsilon() * T::from_f64_lossy(4.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let (alpha, beta, gamma) = {
                    let ci = cols.row(i);
                    let cj = cols.row(j);
                    (ci.dot(&ci), cj.dot(&cj), ci.dot(&cj))
                };
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::from_f64_lossy(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut cols, i, j, c, s);
                rotate_rows(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (cols.reversed_axes(), v.reversed_axes())
}

fn rotate_rows<T: Scalar>(m: &mut Array2<T>, i: usize, j: usize, c: T, s: T) {
    let (mut ri, mut rj) = m.multi_slice_mut((s![i, ..], s![j, ..]));
    for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Horizontal concatenation `[a | b]`.
pub(crate) fn hstack<T: Scalar>(a: ArrayView2<T>, b: ArrayView2<T>) -> Array2<T> {
    ndarray::concatenate(Axis(1), &[a, b]).expect("row counts checked by caller")
}
