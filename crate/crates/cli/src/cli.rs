use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use wolfnet::benchmarks::TestFunction;
use wolfnet::data::ColumnRef;
use wolfnet::training::{ContextPolicy, SampleOrder};

use crate::settings::BenchVariant;

/// Train and evaluate grey-wolf-optimized neural networks.
#[derive(Debug, Parser)]
#[command(name = "wolfnet", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Rank features by absolute Pearson correlation with the label.
    RankFeatures,
    /// Stratified k-fold cross-validation of one model.
    Crossval,
    /// Cross-validate several models on the same folds and tabulate them.
    Compare,
    /// Run the optimizer on a benchmark function over several seeds.
    BenchOptimizer,
    /// Train one model on the whole dataset and save it.
    Train,
    /// Score a CSV with a saved model.
    Predict,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RankFeatures => "rank-features",
            Command::Crossval => "crossval",
            Command::Compare => "compare",
            Command::BenchOptimizer => "bench-optimizer",
            Command::Train => "train",
            Command::Predict => "predict",
        }
    }
}

/// Every setting can also come from `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Dataset CSV.
    #[arg(long, global = true, value_name = "path")]
    pub data: Option<PathBuf>,
    /// Model name, e.g. mrnngwo; a comma-separated list for `compare`.
    #[arg(long, global = true, value_name = "name")]
    pub model: Option<String>,
    /// Saved model to load for `predict`.
    #[arg(long, global = true, value_name = "path")]
    pub model_file: Option<PathBuf>,
    #[arg(long, global = true, value_name = "k")]
    pub folds: Option<usize>,
    #[arg(long, global = true, value_name = "n")]
    pub agents: Option<usize>,
    #[arg(long, global = true, value_name = "n")]
    pub iterations: Option<usize>,
    /// Master seed; falls back to WOLFNET_SEED, then 0.
    #[arg(long, global = true, value_name = "u64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "dir")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, value_name = "n")]
    pub jobs: Option<usize>,
    /// `key = value` settings file.
    #[arg(long, global = true, value_name = "path")]
    pub config: Option<PathBuf>,
    /// Scores at or above this are classified pass.
    #[arg(long, global = true, value_name = "f")]
    pub threshold: Option<f64>,
    /// Feature columns to remove.
    #[arg(long, global = true, value_name = "feature,...")]
    pub drop: Option<String>,
    /// Recurrent context during training: reset or carry.
    #[arg(long, global = true, value_name = "policy")]
    pub context: Option<ContextPolicy>,
    /// Training sample order: dataset-order or seeded-shuffle-once.
    #[arg(long, global = true, value_name = "order")]
    pub order: Option<SampleOrder>,
    /// Label column: a name, a zero-based index, or `last`.
    #[arg(long, global = true, value_name = "column")]
    pub label: Option<ColumnRef>,
    /// The CSV has no header row.
    #[arg(long, global = true)]
    pub no_header: bool,
    /// Benchmark function: sphere, rastrigin or rosenbrock.
    #[arg(long, global = true, value_name = "name")]
    pub function: Option<TestFunction>,
    /// Benchmark dimension.
    #[arg(long, global = true, value_name = "d")]
    pub dimension: Option<usize>,
    /// Number of benchmark runs.
    #[arg(long, global = true, value_name = "n")]
    pub seeds: Option<usize>,
    /// Benchmark variant: standard, modified or both.
    #[arg(long, global = true, value_name = "name")]
    pub variant: Option<BenchVariant>,
}
