use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "kns",
    version,
    about = "k-nearest-sections outlier detection for high-dimensional data",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a labeled synthetic dataset (Gaussian clusters plus planted outliers).
    Generate(GenerateArgs),
    /// Score a dataset with k-NS or LOF.
    Detect(DetectArgs),
    /// Precision/recall/F-measure of score files against dataset labels.
    Eval(EvalArgs),
    /// Regenerate the benchmark datasets and compare both detectors.
    Bench(BenchArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Flat `key=value` file supplying flag defaults; flags given on the
    /// command line win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100)]
    pub dims: usize,
    /// Total point count, outliers and noise points included.
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, default_value_t = 10)]
    pub outliers: usize,
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 80.0, allow_negative_numbers = true)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub sigma_max: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub region_min: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub region_max: f64,
    /// Noise points: cluster draws pushed to mu +/- 4 sigma in a few dimensions.
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = 2)]
    pub noise_dims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Kns,
    Lof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Full,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModeArg {
    AbsLog,
    SiAsc,
    SiDesc,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Algo::Kns)]
    pub algo: Algo,
    /// Neighbour count (k-NS k, or LOF k_nn).
    #[arg(long, default_value_t = 10, value_parser = at_least(1))]
    pub k: usize,
    /// Sections per dimension [default: ceil(1.2 sqrt(n))].
    #[arg(long, value_parser = at_least(2))]
    pub scn: Option<usize>,
    /// [default: full for up to 200 dimensions, sampled above]
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long, default_value_t = 10, value_parser = at_least(1))]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::AbsLog)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on projections x points for k-NS.
    #[arg(long, default_value_t = kns_core::kns::DEFAULT_MAX_WORK)]
    pub max_work: u64,
    /// Single-threaded fixed-order evaluation; output omits timings.
    #[arg(long)]
    pub deterministic: bool,
    /// Allow the full strategy above 2000 dimensions.
    #[arg(long)]
    pub force: bool,
    /// Name of the label column to skip when it is present.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Input has no header row.
    #[arg(long)]
    pub no_header: bool,
    /// Also dump the section population table (k-NS only).
    #[arg(long, value_name = "FILE")]
    pub section_info: Option<PathBuf>,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Score file(s) written by `detect`; repeat to compare methods.
    #[arg(long, required = true)]
    pub scores: Vec<PathBuf>,
    /// Dataset CSV carrying the label column.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Curve CSV; the summary goes next to it as `<stem>_summary.csv`.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "table3")]
    pub suite: String,
    /// Dataset numbers, e.g. `2`, `1-8`, or `1,2,6`.
    #[arg(long, default_value = "1-7")]
    pub datasets: String,
    /// Number of seeds per dataset.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 1)]
    pub first_seed: u64,
    #[arg(long, default_value_t = 10, value_parser = at_least(1))]
    pub k: usize,
    #[arg(long, default_value_t = 10, value_parser = at_least(1))]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::AbsLog)]
    pub mode: ModeArg,
    /// LOF neighbour counts to try; the best per dataset is reported.
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    pub lof_k: Vec<usize>,
    #[arg(long)]
    pub deterministic: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

impl From<StrategyArg> for kns_core::Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Full => kns_core::Strategy::Full,
            StrategyArg::Sampled => kns_core::Strategy::Sampled,
        }
    }
}

impl From<ModeArg> for kns_core::ScoreMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AbsLog => kns_core::ScoreMode::AbsLog,
            ModeArg::SiAsc => kns_core::ScoreMode::SiAsc,
            ModeArg::SiDesc => kns_core::ScoreMode::SiDesc,
        }
    }
}

fn at_least(min: usize) -> impl clap::builder::TypedValueParser<Value = usize> {
    clap::value_parser!(u64)
        .range(min as u64..)
        .map(|v| v as usize)
}
