use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Train/test index pairs of a k-fold partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<(Vec<usize>, Vec<usize>)>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_count(&self) -> usize {
        self.folds.len()
    }
}

fn members_by_class(y: &[usize]) -> Vec<Vec<usize>> {
    let k = y.iter().copied().max().map_or(0, |c| c + 1);
    let mut members = vec![Vec::new(); k];
    for (i, &c) in y.iter().enumerate() {
        members[c].push(i);
    }
    members
}

/// Stratified k-fold partition.
///
/// Each class is shuffled with a generator seeded from `seed`, then all
/// classes are dealt round-robin into the folds with one running counter, so
/// per-class and total fold sizes differ by at most one.
pub fn stratified_kfold(y: &[usize], folds: usize, seed: u64) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_sets = vec![Vec::new(); folds];
    let mut slot = 0usize;
    for (class, mut members) in members_by_class(y).into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < folds {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                count: members.len(),
                required: folds,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            test_sets[slot % folds].push(i);
            slot += 1;
        }
    }
    let n = y.len();
    let folds = test_sets
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            (train, test)
        })
        .collect();
    Ok(FoldPlan { folds, seed })
}

/// Stratified hold-out split of `train_indices` into (fit, validation).
///
/// The validation size is `round(fraction·|train|)`, apportioned over classes
/// by largest remainder (ties to the lower class index).
pub fn train_val_split(
    train_indices: &[usize],
    y: &[usize],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "validation fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let labels: Vec<usize> = train_indices.iter().map(|&i| y[i]).collect();
    let by_class = members_by_class(&labels);
    let total = (fraction * train_indices.len() as f64).round() as usize;

    let quotas: Vec<f64> = by_class.iter().map(|m| fraction * m.len() as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..by_class.len()).filter(|&c| !by_class[c].is_empty()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut missing = total.saturating_sub(counts.iter().sum());
    for &c in order.iter().cycle().take(order.len() * 2) {
        if missing == 0 {
            break;
        }
        if counts[c] < by_class[c].len() {
            counts[c] += 1;
            missing -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fit = Vec::with_capacity(train_indices.len() - total);
    let mut val = Vec::with_capacity(total);
    for (class, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if counts[class] >= members.len() {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                count: members.len(),
                required: 2,
            });
        }
        members.shuffle(&mut rng);
        let (v, f) = members.split_at(counts[class]);
        val.extend(v.iter().map(|&p| train_indices[p]));
        fit.extend(f.iter().map(|&p| train_indices[p]));
    }
    fit.sort_unstable();
    val.sort_unstable();
    Ok((fit, val))
}
