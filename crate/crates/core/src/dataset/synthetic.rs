//! Seeded synthetic classification data.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Samples;

/// Breiman's three-class waveform problem: 21 noisy attributes, each class a
/// random convex mix of two of three shifted triangular waves.
pub fn waveform(m: usize, seed: u64) -> Samples {
    let base = |shift: i32| -> [f64; 21] {
        let mut h = [0.0; 21];
        for (i, v) in h.iter_mut().enumerate() {
            let pos = i as i32 + 1;
            *v = (6 - (pos - 11 - shift).abs()).max(0) as f64;
        }
        h
    };
    let waves = [base(0), base(4), base(-4)];
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((m, 21));
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let class = rng.random_range(0..3usize);
        let u: f64 = rng.random();
        let (a, b) = pairs[class];
        for j in 0..21 {
            let noise: f64 = StandardNormal.sample(&mut rng);
            x[[i, j]] = u * waves[a][j] + (1.0 - u) * waves[b][j] + noise;
        }
        labels.push(class);
    }
    Samples::new(x, labels, vec!["0".into(), "1".into(), "2".into()]).expect("three classes")
}

/// Isotropic Gaussian clusters with uniformly drawn centers in
/// `[-spread, spread]^d`, classes assigned round-robin.
pub fn gaussian_blobs(m: usize, d: usize, k: usize, spread: f64, seed: u64) -> Samples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| rng.random_range(-spread..=spread)).collect())
        .collect();
    let mut x = Array2::zeros((m, d));
    let labels: Vec<usize> = (0..m).map(|i| i % k).collect();
    for (i, &c) in labels.iter().enumerate() {
        for j in 0..d {
            let noise: f64 = StandardNormal.sample(&mut rng);
            x[[i, j]] = centers[c][j] + noise;
        }
    }
    Samples::new(x, labels, (0..k).map(|c| format!("c{c}")).collect()).expect("k >= 2")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waveform_shape_and_balance() {
        let s = waveform(3000, 1);
        assert_eq!(s.features.dim(), (3000, 21));
        for c in 0..3 {
            let n = s.labels.iter().filter(|&&l| l == c).count();
            assert!((800..1200).contains(&n));
        }
        assert_eq!(waveform(50, 4), waveform(50, 4));
    }
}
