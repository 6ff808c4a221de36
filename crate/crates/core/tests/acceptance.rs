//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 7 and 8 need the benchmark datasets as `<name>.csv` (label in
//! the last column, no header) under `$EDRVFL_DATA_DIR` or `<workspace>/data`.
//! Waveform is generated when its file is absent. A criterion that cannot be
//! assessed because data is missing is reported as FAIL with the reason, but
//! does not make the process exit non-zero; a measured shortfall does.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use common::*;
use edrvfl::dataset::{load_csv, synthetic};
use edrvfl::evaluation::{repeat_runs, wilcoxon_signed_rank, Experiment, average_ranks_ascending};
use edrvfl::network::{predict, predict_prefix, train, train_lambda_path};
use edrvfl::solvers::{solve_ridge_dual, solve_ridge_primal, solve_weighted_ridge};
use edrvfl::{Dataset, GridSpec, HyperParams, LabelColumn, Protocol, RunResult, SampleWeights, Samples, Variant};
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Not assessable with the data at hand.
    Blocked(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2024);
    let (mut worst, mut worst_unit) = (0.0f64, 0.0f64);
    for case in 0..200 {
        let m = r.random_range(1..=60);
        let p = r.random_range(1..=60);
        let k = r.random_range(1..=5);
        let lambda = [0.01, 1.0, 100.0][case % 3];
        let d = random_matrix(&mut r, m, p);
        let y = random_matrix(&mut r, m, k);
        let primal = solve_ridge_primal(d.view(), y.view(), lambda).unwrap();
        let dual = solve_ridge_dual(d.view(), y.view(), lambda).unwrap();
        let brute = from_na(&normal_equation_solve(&to_na(&d), &to_na(&y), lambda, None));
        worst = worst
            .max(max_abs_diff(&primal, &dual))
            .max(max_abs_diff(&primal, &brute))
            .max(max_abs_diff(&dual, &brute));
        let unit = solve_weighted_ridge(d.view(), y.view(), lambda, &SampleWeights::ones(m)).unwrap();
        let plain = if p <= m { &primal } else { &dual };
        worst_unit = worst_unit.max(max_abs_diff(&unit, plain));
    }
    let secs = started.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && worst_unit <= 1e-10 && secs < 10.0,
        format!("solver agreement {worst:.2e} (<= 1e-8), unit weights {worst_unit:.2e} (<= 1e-10), {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let ds: Dataset = Dataset::fit(&synthetic::gaussian_blobs(500, 20, 3, 1.5, 77));
    let base = HyperParams { n: 60, l_max: 10, lambda: 0.5, seed: 13, ..Default::default() };
    let mut notes = Vec::new();
    let mut ok = true;

    // grid search trains the weight-only variants through the shared-feature
    // lambda path and the pruned ones through `train`
    for (name, omega_r) in [("edRVFL", 1.0), ("WedRVFL", 0.6)] {
        let wp = train(&ds, &HyperParams { omega_r, p: 0.0, ..base.clone() }).unwrap();
        let variant = if omega_r == 1.0 { Variant::EdRvfl } else { Variant::WedRvfl };
        let hp = HyperParams { omega_r, ..base.clone() };
        variant.check(&hp).unwrap();
        let path = train_lambda_path(&ds, &hp, &[0.125, base.lambda, 4.0]).unwrap();
        let other = path.model(1);
        let bitwise = wp.model.layers.iter().zip(&other.layers).all(|(a, b)| {
            a.beta.iter().zip(b.beta.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
        });
        ok &= bitwise;
        notes.push(format!("{name} {}", if bitwise { "bitwise" } else { "DIFFERS" }));
    }
    let ped_hp = HyperParams { p: 0.3, ..base.clone() };
    Variant::PedRvfl.check(&ped_hp).unwrap();
    let wped = train(&ds, &HyperParams { omega_r: 1.0, ..ped_hp.clone() }).unwrap();
    let ped = train(&ds, &ped_hp).unwrap();
    let bitwise = wped.model == ped.model;
    ok &= bitwise;
    notes.push(format!("PedRVFL {}", if bitwise { "bitwise" } else { "DIFFERS" }));

    // the same three configurations against the step-by-step reference
    let mut worst = 0.0f64;
    for hp in [
        HyperParams { p: 0.0, omega_r: 1.0, ..base.clone() },
        HyperParams { p: 0.0, omega_r: 0.6, ..base.clone() },
        ped_hp,
    ] {
        let lib = train(&ds, &hp).unwrap();
        let reference = reference_train(&to_na(&ds.x), &ds.y, ds.k, &hp);
        for (layer, beta) in lib.model.layers.iter().zip(&reference.betas) {
            let oracle = from_na(beta);
            worst = worst.max(max_abs_diff(&layer.beta, &oracle) / (1.0 + max_abs(&oracle)));
        }
    }
    ok &= worst <= 1e-7;
    let secs = started.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    check(ok, format!("{}; reference rel. error {worst:.1e}; {secs:.1} s", notes.join(", ")))
}

fn criterion_3() -> Outcome {
    let s = synthetic::waveform(600, 3);
    let ds: Dataset = Dataset::fit(&s);
    let m = ds.len() as f64;
    let mut worst = 0.0f64;
    let mut vectors = 0;
    for (seed, omega_r, p) in [(0, 0.2, 0.0), (1, 0.5, 0.0), (2, 0.8, 0.3), (3, 0.95, 0.5)] {
        let hp = HyperParams { n: 40, l_max: 10, omega_r, p, seed, ..Default::default() };
        let t = train(&ds, &hp).unwrap();
        assert_eq!(t.sample_weights.len(), 10);
        for w in &t.sample_weights {
            worst = worst.max((w.sum() - m).abs());
            vectors += 1;
        }
    }
    check(
        worst <= 1e-9 * m,
        format!("{vectors} weight vectors, max |sum - m| = {worst:.2e} (<= {:.1e})", 1e-9 * m),
    )
}

fn criterion_4() -> Outcome {
    let train_s = synthetic::waveform(400, 5);
    let test_s = synthetic::waveform(300, 6);
    let ds: Dataset = Dataset::fit(&train_s);
    let mut ok = true;
    let mut compared = 0;
    for (omega_r, p) in [(1.0, 0.0), (0.6, 0.0), (1.0, 0.3), (0.6, 0.3)] {
        let hp = HyperParams { n: 50, l_max: 10, omega_r, p, seed: 31, ..Default::default() };
        let deep = train(&ds, &hp).unwrap().model;
        let shallow = train(&ds, &HyperParams { l_max: 5, ..hp }).unwrap().model;
        let prefix = predict_prefix(&deep, test_s.features.view(), 5).unwrap();
        let (direct, _) = predict(&shallow, test_s.features.view()).unwrap();
        ok &= prefix == direct;
        compared += prefix.len();
    }
    check(ok, format!("depth-5 prefix vs 5-layer retrain, {compared} labels compared, exact equality"))
}

fn brute_force_p(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nz.len();
    let ranks = average_ranks_ascending(&nz.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let observed: f64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        le += u64::from(w <= observed + 1e-9);
        ge += u64::from(w >= observed - 1e-9);
    }
    (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
}

fn criterion_5() -> Outcome {
    let mut r = rng(55);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = r.random_range(5..=12);
        let ties = r.random_bool(0.5);
        let diffs: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = r.random_range(-1.0..1.0);
                if ties { (v * 4.0).round() / 4.0 } else { v }
            })
            .collect();
        let zeros = vec![0.0; n];
        let Ok(res) = wilcoxon_signed_rank(&diffs, &zeros) else { continue };
        worst = worst.max((res.p_value - brute_force_p(&diffs)).abs());
        done += 1;
    }
    let five = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]).unwrap().p_value;
    check(
        worst <= f64::EPSILON && five == 0.0625,
        format!("100 vectors vs sign enumeration, max |dp| = {worst:.1e}; [1..5] gives p = {five}"),
    )
}

fn criterion_6() -> Outcome {
    let ds: Dataset = Dataset::fit(&synthetic::waveform(800, 8));
    let (mut worst_mean, mut worst_var) = (0.0f64, 0.0f64);
    let mut layers = 0;
    for (omega_r, p) in [(1.0, 0.0), (0.5, 0.4)] {
        let hp = HyperParams { n: 64, l_max: 10, gamma: 2.0, alpha: 0.5, omega_r, p, ..Default::default() };
        let model = train(&ds, &hp).unwrap().model;
        let pre = model.pre_activations(ds.x.view()).unwrap();
        for (layer, z) in model.layers.iter().zip(&pre) {
            let stats = layer.bn_stats.as_ref().unwrap();
            let m = z.nrows() as f64;
            for j in 0..z.ncols() {
                let s2 = stats.sigma2[j];
                let denom = (s2 + stats.epsilon).sqrt();
                let col: Vec<f64> = z.column(j).iter().map(|v| (v - stats.mu[j]) / denom).collect();
                let mean = col.iter().sum::<f64>() / m;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
                worst_mean = worst_mean.max(mean.abs());
                worst_var = worst_var.max((var - s2 / (s2 + stats.epsilon)).abs());
            }
            layers += 1;
        }
    }
    check(
        worst_mean <= 1e-6 && worst_var <= 1e-4,
        format!("{layers} layers, max |mean| = {worst_mean:.1e}, max |var - s2/(s2+eps)| = {worst_var:.1e}"),
    )
}

const SUITE: [&str; 5] = ["waveform", "contrac", "glass", "cardio-3", "bank"];

fn data_dir() -> PathBuf {
    std::env::var_os("EDRVFL_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// The suite datasets that can be loaded, with a note on their source.
fn suite() -> Vec<(&'static str, Samples, String)> {
    let dir = data_dir();
    let mut out = Vec::new();
    for name in SUITE {
        let path = dir.join(format!("{name}.csv"));
        if path.exists() {
            let table = load_csv(&path, &LabelColumn::Last, false).expect("dataset parses");
            out.push((name, Samples::from_table(&table).expect("labels"), path.display().to_string()));
        } else if name == "waveform" {
            out.push((name, synthetic::waveform(5000, 0), "generated, 5000 samples".into()));
        }
    }
    out
}

struct Bench {
    available: Vec<&'static str>,
    edrvfl: Vec<RunResult>,
    /// Only filled when enough datasets are present to assess 7c and 8.
    wpedrvfl: Vec<RunResult>,
    pedrvfl: Vec<RunResult>,
}

fn run(name: &str, samples: &Samples, variant: Variant) -> RunResult {
    let grid = GridSpec::default();
    let protocol = Protocol::default();
    let base = HyperParams::default();
    let exp = Experiment { name, samples, variant, grid: &grid, base: &base, protocol: &protocol };
    let r = repeat_runs(&exp, 10, 0).expect("benchmark run");
    println!(
        "    {name} {variant}: {:.2} ± {:.2} ({:.0} s)",
        100.0 * r.mean,
        100.0 * r.std,
        r.wall_clock_seconds
    );
    r
}

fn benchmark() -> Bench {
    let data = suite();
    let available: Vec<&'static str> = data.iter().map(|(n, _, _)| *n).collect();
    for (name, _, source) in &data {
        println!("    dataset {name}: {source}");
    }
    let mut bench = Bench { available, edrvfl: vec![], wpedrvfl: vec![], pedrvfl: vec![] };
    let full = data.len() >= 3;
    for (name, samples, _) in &data {
        bench.edrvfl.push(run(name, samples, Variant::EdRvfl));
        if full {
            bench.wpedrvfl.push(run(name, samples, Variant::WpedRvfl));
        }
        if data.len() == SUITE.len() {
            bench.pedrvfl.push(run(name, samples, Variant::PedRvfl));
        }
    }
    bench
}

fn criterion_7(b: &Bench) -> Outcome {
    let mean_of = |name: &str, rs: &[RunResult]| rs.iter().find(|r| r.dataset == name).map(|r| r.mean);
    let mut parts = Vec::new();
    let mut measured_ok = true;
    let mut blocked = Vec::new();

    match mean_of("waveform", &b.edrvfl) {
        Some(m) => {
            measured_ok &= m >= 0.83;
            parts.push(format!("waveform edRVFL_N {:.2}% (>= 83)", 100.0 * m));
        }
        None => blocked.push("waveform run missing".to_string()),
    }
    match mean_of("contrac", &b.edrvfl) {
        Some(m) => {
            measured_ok &= m >= 0.50;
            parts.push(format!("contrac edRVFL_N {:.2}% (>= 50)", 100.0 * m));
        }
        None => blocked.push("contrac.csv not available".to_string()),
    }
    if b.available.len() >= 3 {
        let wins = b
            .available
            .iter()
            .filter(|d| match (mean_of(d, &b.wpedrvfl), mean_of(d, &b.edrvfl)) {
                (Some(w), Some(e)) => w >= e,
                _ => false,
            })
            .count();
        measured_ok &= wins >= 3;
        parts.push(format!("WPedRVFL >= edRVFL_N on {wins} of {} datasets (>= 3)", b.available.len()));
    } else {
        blocked.push(format!(
            "WPedRVFL comparison needs 3 of the 5 datasets, {} available ({})",
            b.available.len(),
            b.available.join(", ")
        ));
    }
    let detail = parts.join("; ");
    if !measured_ok {
        Outcome::Fail(format!("{detail}; {}", blocked.join("; ")))
    } else if !blocked.is_empty() {
        Outcome::Blocked(format!("{detail}; {}", blocked.join("; ")))
    } else {
        Outcome::Pass(detail)
    }
}

fn criterion_8(b: &Bench) -> Outcome {
    if b.available.len() < SUITE.len() {
        return Outcome::Blocked(format!(
            "needs all 5 suite datasets, {} available ({})",
            b.available.len(),
            b.available.join(", ")
        ));
    }
    let mean_std = |rs: &[RunResult]| 100.0 * rs.iter().map(|r| r.std).sum::<f64>() / rs.len() as f64;
    let base = mean_std(&b.edrvfl);
    let ped = mean_std(&b.pedrvfl);
    let wped = mean_std(&b.wpedrvfl);
    check(
        ped <= base + 0.5 && wped <= base + 0.5,
        format!("mean std edRVFL_N {base:.2}, PedRVFL {ped:.2}, WPedRVFL {wped:.2} (limit {:.2})", base + 0.5),
    )
}

fn main() {
    let mut measured_failure = false;
    let mut report = |n: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                measured_failure = true;
                ("FAIL", d)
            }
            Outcome::Blocked(d) => ("FAIL", format!("not assessable: {d}")),
        };
        println!("criterion {n} {tag}: {name}: {detail}");
    };
    report(1, "solver oracle suite", criterion_1());
    report(2, "degenerate-variant equivalence", criterion_2());
    report(3, "weight conservation", criterion_3());
    report(4, "prefix vs retrain", criterion_4());
    report(5, "Wilcoxon exactness", criterion_5());
    report(6, "batch-norm statistics", criterion_6());
    let started = Instant::now();
    let bench = benchmark();
    println!("    benchmark runs took {:.0} s", started.elapsed().as_secs_f64());
    report(7, "desk-scale reproduction", criterion_7(&bench));
    report(8, "std ordering", criterion_8(&bench));
    if measured_failure {
        std::process::exit(1);
    }
}
