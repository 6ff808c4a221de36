use edrvfl::evaluation::{average_ranks_ascending, wilcoxon_signed_rank};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-sided p by listing all 2ⁿ sign patterns of the non-zero differences.
fn brute_force_p(a: &[f64], b: &[f64]) -> (f64, f64) {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks_ascending(&abs);
    let observed: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (observed, (2.0 * le.min(ge) as f64 / total).min(1.0))
}

#[test]
fn exact_path_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(5..=12);
        // coarse values produce ties and zero differences
        let coarse = rng.random_bool(0.5);
        let draw = |rng: &mut ChaCha8Rng| {
            let v: f64 = rng.random_range(0.0..1.0);
            if coarse { (v * 8.0).round() / 8.0 } else { v }
        };
        let a: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let Ok(r) = wilcoxon_signed_rank(&a, &b) else { continue };
        let (w, p) = brute_force_p(&a, &b);
        assert_eq!(r.statistic, w);
        assert!(r.exact);
        assert!((r.p_value - p).abs() <= f64::EPSILON, "{a:?} {b:?}: {} vs {p}", r.p_value);
        checked += 1;
    }
}

#[test]
fn five_positive_differences() {
    let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]).unwrap();
    assert_eq!(r.p_value, 0.0625);
    let (_, brute) = brute_force_p(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]);
    assert_eq!(brute, 0.0625);
}
