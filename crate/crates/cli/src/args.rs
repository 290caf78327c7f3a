use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Regression by binary sparse coding.
#[derive(Debug, Parser)]
#[command(name = "binsc", version)]
pub struct Cli {
    /// Worker threads (defaults to BINSC_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with option defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic correlated dataset.
    GenData(GenDataArgs),
    /// Shuffle a dataset and split it into training and test files.
    Split(SplitArgs),
    /// Fit a model directory from training and test files.
    Fit(FitArgs),
    /// Predict targets for every row of a CSV file.
    Predict(PredictArgs),
    /// Compare predictions with the truth.
    Eval(EvalArgs),
    /// Fit and evaluate once per dictionary size.
    Sweep(SweepArgs),
    /// Fit Q∞ + B·exp(-C·N_q) to a sweep table.
    FitScaling(FitScalingArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub target_noise_sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: PathBuf,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Exhaustive,
    Sa,
    EmbeddedSa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PretrainKind {
    Test,
    Combined,
    Off,
}

#[derive(Debug, Args)]
pub struct LearnFlags {
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    #[arg(long, value_enum)]
    pub pretrain: Option<PretrainKind>,
    /// Tune λ to this mean code sparsity.
    #[arg(long, conflicts_with = "lambda")]
    pub target_sparsity: Option<f64>,
    /// Fixed λ (disables tuning).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub reads: Option<usize>,
    #[arg(long)]
    pub probe_size: Option<usize>,
    /// Hardware mask file for the embedded solver.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Model directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub nq: Option<usize>,
    #[command(flatten)]
    pub learn: LearnFlags,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Error histogram CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated dictionary sizes.
    #[arg(long, value_delimiter = ',')]
    pub nq: Option<Vec<usize>>,
    #[command(flatten)]
    pub learn: LearnFlags,
}

#[derive(Debug, Args)]
pub struct FitScalingArgs {
    /// CSV with an `n_q` column.
    #[arg(long)]
    pub input: PathBuf,
    /// Fit parameters JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Fitted curve CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Column holding the values to fit.
    #[arg(long)]
    pub column: Option<String>,
    /// Sizes to leave out of the fit.
    #[arg(long, value_delimiter = ',')]
    pub exclude_nq: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
