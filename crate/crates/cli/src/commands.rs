use std::io::Read;
use std::path::{Path, PathBuf};

use edrvfl::dataset::{read_features, DatasetManifest};
use edrvfl::evaluation::{
    accuracy, paired_means, repeat_runs, sweep as run_sweep, wilcoxon_signed_rank, Experiment, SweepParam,
    WilcoxonResult, SIGNIFICANCE,
};
use edrvfl::network::{aggregate, load_model, predict as predict_labels, save_model, train as train_model};
use edrvfl::{ComparisonReport, Dataset, EnsembleModel, GridSpec, HyperParams, LabelColumn, Protocol, RunResult, Variant};
use serde::Serialize;

use crate::config::{parse_variant, ConfigFile, DataSource};
use crate::error::{config_err, CliError, CliResult};
use crate::output::{write_atomic, write_json};
use crate::{BenchmarkArgs, CompareArgs, DataArgs, HyperArgs, PredictArgs, ProtocolArgs, SweepArgs, TrainArgs};

fn set_jobs(jobs: Option<usize>) -> CliResult<()> {
    match jobs {
        None => Ok(()),
        Some(0) => Err(config_err("jobs: must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_err(format!("jobs: {e}"))),
    }
}

fn apply_hyper(hp: &mut HyperParams, a: &HyperArgs) -> CliResult<()> {
    if let Some(v) = a.lambda {
        hp.lambda = v;
    }
    if let Some(v) = a.n {
        hp.n = v;
    }
    if let Some(v) = a.l_max {
        hp.l_max = v;
    }
    if let Some(v) = a.gamma {
        hp.gamma = v;
    }
    if let Some(v) = a.alpha {
        hp.alpha = v;
    }
    if let Some(v) = a.omega_r {
        hp.omega_r = v;
    }
    if let Some(v) = a.p {
        hp.p = v;
    }
    if let Some(v) = &a.activation {
        hp.activation = v.parse().map_err(|e: String| config_err(format!("activation: {e}")))?;
    }
    if let Some(v) = &a.aggregation {
        hp.aggregation = v.parse().map_err(|e: String| config_err(format!("aggregation: {e}")))?;
    }
    if let Some(v) = a.epsilon {
        hp.epsilon = v;
    }
    if a.no_bias {
        hp.include_bias = false;
    }
    Ok(())
}

fn apply_protocol(p: &mut Protocol, a: &ProtocolArgs) {
    if let Some(v) = a.folds {
        p.folds = v;
    }
    if let Some(v) = a.val_fraction {
        p.val_fraction = v;
    }
    if let Some(v) = a.split_seed {
        p.split_seed = v;
    }
}

fn data_source(a: &DataArgs, cfg: &ConfigFile) -> CliResult<DataSource> {
    let label_column = match &a.label_column {
        Some(s) => s.parse().unwrap_or(LabelColumn::Last),
        None => cfg.label_column()?.unwrap_or(LabelColumn::Last),
    };
    Ok(DataSource {
        data: a.data.clone().or_else(|| cfg.path(&cfg.data)),
        label_column,
        has_header: a.header || cfg.has_header.unwrap_or(false),
        manifest: a.manifest.clone().or_else(|| cfg.path(&cfg.manifest)),
        dataset: a.dataset.clone().or_else(|| cfg.dataset.clone()),
    })
}

fn seed_or_default(flag: Option<u64>, cfg: &ConfigFile) -> u64 {
    flag.or_else(|| cfg.seed()).unwrap_or_else(|| {
        log::warn!("no --seed given; using seed 0");
        0
    })
}

#[derive(Serialize)]
struct TrainReport<'a> {
    dataset: &'a str,
    samples: usize,
    features: usize,
    classes: usize,
    hyperparams: &'a HyperParams,
    /// Accuracy of each layer's own prediction on the training data.
    layer_accuracy: Vec<f64>,
    ensemble_accuracy: f64,
}

pub fn train(a: TrainArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    set_jobs(a.common.jobs.or(cfg.jobs))?;
    let mut hp = cfg.hyperparams()?;
    apply_hyper(&mut hp, &a.hyper)?;
    hp.seed = seed_or_default(a.common.seed, &cfg);
    if let Some(v) = a.variant.as_deref().or(cfg.variant.as_deref()) {
        parse_variant(v)?.check(&hp)?;
    }
    hp.validate()?;

    let (name, samples) = data_source(&a.data, &cfg)?.load()?;
    let ds: Dataset = Dataset::fit(&samples);
    let trained = train_model(&ds, &hp)?;
    let layer_accuracy = trained
        .outputs
        .labels
        .iter()
        .map(|pred| accuracy(pred, &ds.y))
        .collect::<edrvfl::Result<Vec<_>>>()?;
    let ensemble = aggregate(&trained.outputs, trained.model.depth(), hp.aggregation);
    let report = TrainReport {
        dataset: &name,
        samples: ds.len(),
        features: ds.n_features(),
        classes: ds.k,
        hyperparams: &hp,
        layer_accuracy,
        ensemble_accuracy: accuracy(&ensemble, &ds.y)?,
    };

    save_model(&trained.model, &a.out)?;
    let report_path = a.report.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".report.json");
        PathBuf::from(p)
    });
    write_json(&report_path, &report)?;
    println!(
        "{name}: {} samples, {} features, {} classes, training accuracy {:.4}",
        report.samples, report.features, report.classes, report.ensemble_accuracy
    );
    Ok(())
}

fn open_input(path: &Path) -> CliResult<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(std::io::stdin()));
    }
    let file = std::fs::File::open(path).map_err(|source| edrvfl::Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Box::new(file))
}

pub fn predict(a: PredictArgs) -> CliResult<()> {
    let model: EnsembleModel = load_model(&a.model)?;
    let drop = a.drop_column.as_deref().map(|s| s.parse::<LabelColumn>().unwrap_or(LabelColumn::Last));
    let x = read_features(open_input(&a.data)?, drop.as_ref(), a.header)?;
    let mut text = String::new();
    if x.nrows() > 0 {
        let (labels, _) = predict_labels(&model, x.view())?;
        for c in labels {
            text.push_str(&model.label_names[c]);
            text.push('\n');
        }
    }
    match &a.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Failure {
    dataset: String,
    variant: Option<Variant>,
    error: String,
}

#[derive(Serialize)]
struct Timing<'a> {
    dataset: &'a str,
    variant: Variant,
    wall_clock_seconds: f64,
}

fn load_grid(path: &Path) -> CliResult<GridSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read grid {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("grid {}: {e}", path.display())))
}

pub fn benchmark(a: BenchmarkArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    set_jobs(a.common.jobs.or(cfg.jobs))?;
    let seed = a
        .common
        .seed
        .or_else(|| cfg.seed())
        .ok_or_else(|| config_err("seed: benchmark runs require an explicit --seed"))?;
    let manifest_path = a
        .manifest
        .clone()
        .or_else(|| cfg.path(&cfg.manifest))
        .ok_or_else(|| config_err("manifest: no dataset manifest given"))?;
    let names: Vec<String> = if !a.variants.is_empty() {
        a.variants.clone()
    } else if let Some(v) = &cfg.variants {
        v.clone()
    } else if let Some(v) = &cfg.variant {
        vec![v.clone()]
    } else {
        Variant::ALL.iter().map(|v| v.to_string()).collect()
    };
    let variants = names.iter().map(|n| parse_variant(n)).collect::<CliResult<Vec<_>>>()?;
    let grid = match &a.grid {
        Some(p) => load_grid(p)?,
        None => cfg.grid.clone().unwrap_or_default(),
    };
    grid.validate()?;
    let base = cfg.hyperparams()?;
    let mut protocol = cfg.protocol.clone().unwrap_or_default();
    apply_protocol(&mut protocol, &a.protocol);
    let repetitions = a.repetitions.or(cfg.repetitions).unwrap_or(10);
    if repetitions == 0 {
        return Err(config_err("repetitions: must be at least 1"));
    }

    let manifest = DatasetManifest::load(&manifest_path)?;
    let mut results: Vec<RunResult> = Vec::new();
    let mut failures: Vec<Failure> = Vec::new();
    let mut first_error: Option<CliError> = None;
    for entry in &manifest.entries {
        let samples = match entry.load() {
            Ok(s) => s,
            Err(e) => {
                log::error!("{}: {e}", entry.name);
                failures.push(Failure {
                    dataset: entry.name.clone(),
                    variant: None,
                    error: e.to_string(),
                });
                first_error.get_or_insert(e.into());
                continue;
            }
        };
        for &variant in &variants {
            let exp = Experiment {
                name: &entry.name,
                samples: &samples,
                variant,
                grid: &grid,
                base: &base,
                protocol: &protocol,
            };
            match repeat_runs(&exp, repetitions, seed) {
                Ok(r) => {
                    eprintln!("{} {}: {:.2} ± {:.2}", entry.name, variant, 100.0 * r.mean, 100.0 * r.std);
                    results.push(r);
                }
                Err(e) => {
                    log::error!("{} {variant}: {e}", entry.name);
                    failures.push(Failure {
                        dataset: entry.name.clone(),
                        variant: Some(variant),
                        error: e.to_string(),
                    });
                    first_error.get_or_insert(e.into());
                }
            }
        }
    }

    let out = &a.out;
    let mut jsonl = String::new();
    for r in &results {
        jsonl.push_str(&r.to_json_line()?);
        jsonl.push('\n');
    }
    write_atomic(&out.join("results.jsonl"), jsonl.as_bytes())?;
    let timings: Vec<Timing> = results
        .iter()
        .map(|r| Timing {
            dataset: &r.dataset,
            variant: r.variant,
            wall_clock_seconds: r.wall_clock_seconds,
        })
        .collect();
    write_json(&out.join("timings.json"), &timings)?;
    if !failures.is_empty() {
        write_json(&out.join("failures.json"), &failures)?;
    }
    if results.is_empty() {
        return Err(first_error.unwrap_or_else(|| config_err("no results")));
    }
    match ComparisonReport::from_results(&results) {
        Ok(report) => {
            write_json(&out.join("report.json"), &report)?;
            let text = report.render_text();
            write_atomic(&out.join("report.txt"), text.as_bytes())?;
            print!("{text}");
        }
        Err(e) => log::warn!("no comparison report: {e}"),
    }
    Ok(())
}

pub fn sweep(a: SweepArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    set_jobs(a.common.jobs.or(cfg.jobs))?;
    let param: SweepParam = a.parameter.parse()?;
    let mut fixed = cfg.hyperparams()?;
    apply_hyper(&mut fixed, &a.hyper)?;
    fixed.seed = seed_or_default(a.common.seed, &cfg);
    let mut protocol = cfg.protocol.clone().unwrap_or_default();
    apply_protocol(&mut protocol, &a.protocol);
    let (_, samples) = data_source(&a.data, &cfg)?.load()?;
    let rows = run_sweep(&samples, param, &a.values, &fixed, &protocol)?;
    let mut csv = format!("{param},accuracy\n");
    for (v, acc) in rows {
        csv.push_str(&format!("{v},{acc}\n"));
    }
    match &a.out {
        Some(path) => write_atomic(path, csv.as_bytes()),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Comparison {
    a: String,
    b: String,
    datasets: Vec<String>,
    mean_a: Vec<f64>,
    mean_b: Vec<f64>,
    test: WilcoxonResult,
    symbol: char,
}

fn read_results(path: &Path) -> CliResult<Vec<RunResult>> {
    let mut text = String::new();
    open_input(path)?
        .read_to_string(&mut text)
        .map_err(|source| edrvfl::Error::File {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(RunResult::parse_jsonl(&text)?)
}

fn method_name(path: &Path, results: &[RunResult]) -> String {
    let first = results.first().map(|r| r.variant);
    if first.is_some() && results.iter().all(|r| Some(r.variant) == first) {
        return first.map(|v| v.to_string()).unwrap_or_default();
    }
    path.display().to_string()
}

pub fn compare(a: CompareArgs) -> CliResult<()> {
    let ra = read_results(&a.a)?;
    let rb = read_results(&a.b)?;
    let (datasets, va, vb) = paired_means(&ra, &rb);
    let test = wilcoxon_signed_rank(&va, &vb)?;
    let symbol = if test.p_value >= SIGNIFICANCE {
        '='
    } else if test.statistic > test.w_minus {
        '+'
    } else {
        '-'
    };
    let cmp = Comparison {
        a: method_name(&a.a, &ra),
        b: method_name(&a.b, &rb),
        datasets,
        mean_a: va,
        mean_b: vb,
        test,
        symbol,
    };
    let width = cmp.datasets.iter().map(String::len).max().unwrap_or(0).max(7);
    println!("{:width$}  {:>10}  {:>10}", "dataset", cmp.a, cmp.b);
    for (i, d) in cmp.datasets.iter().enumerate() {
        println!("{d:width$}  {:>10.2}  {:>10.2}", 100.0 * cmp.mean_a[i], 100.0 * cmp.mean_b[i]);
    }
    println!(
        "W+ = {}, W- = {}, n = {}, p = {:.4} ({}) {}",
        test.statistic,
        test.w_minus,
        test.n,
        test.p_value,
        if test.exact { "exact" } else { "normal approximation" },
        symbol
    );
    if let Some(path) = &a.out {
        write_json(path, &cmp)?;
    }
    Ok(())
}
