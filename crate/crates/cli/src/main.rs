mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

/// Train, apply and benchmark edRVFL-family classifiers on CSV data.
#[derive(Parser, Debug)]
#[command(name = "edrvfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit one configuration and write a model file.
    Train(TrainArgs),
    /// Print one predicted label per row of a CSV file.
    Predict(PredictArgs),
    /// Cross-validated grid search over every dataset of a manifest.
    Benchmark(BenchmarkArgs),
    /// Accuracy as one of omega_r or p varies with everything else fixed.
    Sweep(SweepArgs),
    /// Wilcoxon signed-rank test between two results files.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for hidden weights (and base seed of repetitions).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DataArgs {
    /// CSV file with one sample per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Label column of --data: index, header name or `last`.
    #[arg(long)]
    pub label_column: Option<String>,
    /// The CSV file starts with a header row.
    #[arg(long)]
    pub header: bool,
    /// Dataset manifest (JSON) instead of --data.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Manifest entry to use.
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct HyperArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Hidden neurons per layer.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega_r: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// relu, sigmoid or tanh.
    #[arg(long)]
    pub activation: Option<String>,
    /// mean_score or majority_vote.
    #[arg(long)]
    pub aggregation: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Drop the hidden-layer bias.
    #[arg(long)]
    pub no_bias: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub val_fraction: Option<f64>,
    /// Seed of the fold partition (defaults to 0).
    #[arg(long)]
    pub split_seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// edrvfl, wedrvfl, pedrvfl or wpedrvfl.
    #[arg(long)]
    pub variant: Option<String>,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Training report (defaults to `<out>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV file of feature rows; `-` reads standard input.
    #[arg(long)]
    pub data: PathBuf,
    /// Column to ignore, e.g. the label column of a training file.
    #[arg(long)]
    pub drop_column: Option<String>,
    #[arg(long)]
    pub header: bool,
    /// Write labels here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Comma-separated variants (default: all four).
    #[arg(long, value_delimiter = ',')]
    pub variants: Vec<String>,
    /// JSON grid file (default: the coarse grid).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// omega_r or p.
    #[arg(long)]
    pub parameter: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// CSV file to write (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Results file of the first method.
    pub a: PathBuf,
    /// Results file of the second method.
    pub b: PathBuf,
    /// Also write the comparison as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Compare(a) => commands::compare(a),
    };
    if let Err(e) = result {
        report(&e);
        std::process::exit(e.exit_code());
    }
}

fn report(e: &CliError) {
    eprintln!("error: {e}");
}
