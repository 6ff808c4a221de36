use ndarray::ArrayView2;

use super::hyperparams::pruned_count;
use crate::{Error, Result, Scalar};

/// Importance of each hidden neuron: the sum over classes of the absolute
/// output weights in its row of `beta`. Only the first `n` rows (hidden
/// neurons) are scored; direct-link rows are never candidates.
pub fn neuron_importance<T: Scalar>(beta: ArrayView2<T>, n: usize) -> Result<Vec<T>> {
    if beta.nrows() < n {
        return Err(Error::dims(format!(
            "output weights have {} rows, cannot score {n} neurons",
            beta.nrows()
        )));
    }
    Ok(beta
        .rows()
        .into_iter()
        .take(n)
        .map(|row| row.iter().fold(T::zero(), |acc, v| acc + v.abs()))
        .collect())
}

/// Keep-mask that drops the `⌊p·n⌋` least important neurons (lower index
/// first among equal scores), always keeping at least one.
pub fn prune_mask<T: Scalar>(theta: &[T], p: f64) -> Vec<bool> {
    let n = theta.len();
    let drop = pruned_count(p, n);
    let mut mask = vec![true; n];
    if drop == 0 {
        return mask;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        theta[a]
            .partial_cmp(&theta[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &i in &order[..drop] {
        mask[i] = false;
    }
    mask
}
