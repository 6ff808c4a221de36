//! Shared helpers: random instances, nalgebra conversions and a direct
//! re-implementation of ensemble training used as an oracle.
#![allow(dead_code)]

use edrvfl::network::init_layer_weights;
use edrvfl::HyperParams;
use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-1.0..1.0))
}

pub fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn from_na(a: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `(DᵀWD + λI)⁻¹DᵀWY` by LU on the explicit normal equations.
pub fn normal_equation_solve(d: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64, w: Option<&[f64]>) -> DMatrix<f64> {
    let mut dw = d.clone();
    if let Some(w) = w {
        for (i, mut row) in dw.row_iter_mut().enumerate() {
            row *= w[i];
        }
    }
    let lhs = d.transpose() * &dw + DMatrix::identity(d.ncols(), d.ncols()) * lambda;
    let rhs = dw.transpose() * y;
    lhs.lu().solve(&rhs).expect("regularized system is invertible")
}

pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

pub struct Reference {
    pub betas: Vec<DMatrix<f64>>,
    pub labels: Vec<Vec<usize>>,
    pub weights: Vec<Vec<f64>>,
    pub masks: Vec<Vec<bool>>,
}

/// Ensemble training written out step by step: batch-normalized ReLU
/// features of `[previous kept features | X]`, ridge solve on
/// `[H | X]` (sample-weighted from the second layer on), weight update and
/// magnitude pruning. Only the random draws are shared with the library.
pub fn reference_train(x: &DMatrix<f64>, y: &[usize], k: usize, hp: &HyperParams) -> Reference {
    assert!(matches!(hp.activation, edrvfl::Activation::Relu));
    let m = x.nrows();
    let t = DMatrix::from_fn(m, k, |i, j| if y[i] == j { 1.0 } else { 0.0 });
    let mut input = x.clone();
    let mut w = vec![1.0; m];
    let mut out = Reference {
        betas: vec![],
        labels: vec![],
        weights: vec![],
        masks: vec![],
    };
    for l in 0..hp.l_max {
        let (wl, bl) = init_layer_weights::<f64>(input.ncols(), hp.n, hp.seed, l);
        let mut z = &input * to_na(&wl);
        if hp.include_bias {
            for mut row in z.row_iter_mut() {
                for j in 0..hp.n {
                    row[j] += bl[j];
                }
            }
        }
        let mut h = z.clone();
        for j in 0..hp.n {
            let col: Vec<f64> = z.column(j).iter().copied().collect();
            let mean = col.iter().sum::<f64>() / m as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
            for i in 0..m {
                let v = hp.gamma * (col[i] - mean) / (var + hp.epsilon).sqrt() + hp.alpha;
                h[(i, j)] = v.max(0.0);
            }
        }
        let d = DMatrix::from_fn(m, hp.n + x.ncols(), |i, j| if j < hp.n { h[(i, j)] } else { x[(i, j - hp.n)] });
        let weighted = l > 0 && hp.omega_r < 1.0;
        let beta = normal_equation_solve(&d, &t, hp.lambda, weighted.then_some(&w[..]));
        out.weights.push(if weighted { w.clone() } else { vec![1.0; m] });
        let scores = &d * &beta;
        let labels: Vec<usize> = (0..m)
            .map(|i| argmax(&scores.row(i).iter().copied().collect::<Vec<_>>()))
            .collect();

        if hp.omega_r < 1.0 {
            let n_r = labels.iter().zip(y).filter(|(a, b)| a == b).count();
            let n_w = m - n_r;
            w = if n_w == 0 {
                vec![1.0; m]
            } else {
                let ww = ((m as f64 - n_r as f64 * hp.omega_r) / n_w as f64).min(1e6);
                labels.iter().zip(y).map(|(a, b)| if a == b { hp.omega_r } else { ww }).collect()
            };
        }
        let mut keep = vec![true; hp.n];
        if hp.p > 0.0 {
            let theta: Vec<f64> = (0..hp.n).map(|i| beta.row(i).iter().map(|v| v.abs()).sum()).collect();
            let drop = ((hp.p * hp.n as f64 + 1e-9).floor() as usize).min(hp.n - 1);
            let mut order: Vec<usize> = (0..hp.n).collect();
            order.sort_by(|&a, &b| theta[a].partial_cmp(&theta[b]).unwrap().then(a.cmp(&b)));
            for &i in &order[..drop] {
                keep[i] = false;
            }
        }
        let kept: Vec<usize> = (0..hp.n).filter(|&j| keep[j]).collect();
        input = DMatrix::from_fn(m, kept.len() + x.ncols(), |i, j| {
            if j < kept.len() {
                h[(i, kept[j])]
            } else {
                x[(i, j - kept.len())]
            }
        });
        out.betas.push(beta);
        out.labels.push(labels);
        out.masks.push(keep);
    }
    out
}
