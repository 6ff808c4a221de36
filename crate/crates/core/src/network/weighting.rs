use crate::solvers::SampleWeights;

/// Upper bound on the weight of misclassified samples.
pub const MAX_WRONG_WEIGHT: f64 = 1e6;

/// Weights for the next layer's solve: `omega_r` for correctly classified
/// samples and `ω_w = (m − n_r·ω_r) / n_w` for the rest, so the total stays
/// `m`. All ones when nothing was misclassified.
pub fn update_sample_weights(correct: &[bool], omega_r: f64) -> SampleWeights {
    let m = correct.len();
    let n_r = correct.iter().filter(|&&c| c).count();
    let n_w = m - n_r;
    if n_w == 0 {
        return SampleWeights::ones(m);
    }
    let mut omega_w = (m as f64 - n_r as f64 * omega_r) / n_w as f64;
    if omega_w > MAX_WRONG_WEIGHT {
        log::warn!("weight of misclassified samples {omega_w:.3e} clamped to {MAX_WRONG_WEIGHT:e}");
        omega_w = MAX_WRONG_WEIGHT;
    }
    SampleWeights::new(
        correct
            .iter()
            .map(|&c| if c { omega_r } else { omega_w })
            .collect(),
    )
}
