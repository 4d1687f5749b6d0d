use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ivf", version, about = "Regression benchmarks for interval-valued data")]
pub struct Cli {
    /// Worker threads (overrides IVF_THREADS; default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a dataset from one of the simulation settings.
    Simulate(SimulateArgs),
    /// Fit a model on a CSV and save it as JSON.
    Fit(FitArgs),
    /// Predict with a saved model.
    Predict(PredictArgs),
    /// Score a prediction file against the truth.
    Evaluate(EvaluateArgs),
    /// Run the simulation benchmark grid.
    Bench(BenchArgs),
    /// Train/test comparison on a user dataset.
    Holdout(HoldoutArgs),
    /// Write an SVG figure.
    Plot(PlotArgs),
}

#[derive(Debug, Args, serde::Serialize)]
pub struct DataArgs {
    /// Response variable name (default: `y`, else the last pair).
    #[arg(long)]
    pub response: Option<String>,
    /// Accept rows with lower > upper (negative radius).
    #[arg(long)]
    pub allow_incoherent: bool,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub setting: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Gaussian,
    Epanechnikov,
    Triangular,
    Uniform,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct ModelArgs {
    /// Trees per forest component.
    #[arg(long, default_value_t = 500)]
    pub trees: usize,
    /// Candidate features per split (default: a third of the 2p features).
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub min_node: usize,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    /// Fixed kernel bandwidth.
    #[arg(long, conflicts_with = "bw_auto")]
    pub bandwidth: Option<f64>,
    /// Choose the bandwidth by leave-one-out CV (the default).
    #[arg(long)]
    pub bw_auto: bool,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub model: String,
    /// Training CSV.
    #[arg(long = "in", alias = "train")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model_file: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct EvaluateArgs {
    /// Prediction CSV written by `predict`.
    #[arg(long)]
    pub pred: PathBuf,
    /// Dataset CSV holding the observed response.
    #[arg(long)]
    pub truth: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct BenchArgs {
    /// Setting ids, e.g. `1-4` or `1,3,5-7`.
    #[arg(long, default_value = "1-7")]
    pub settings: String,
    /// Total generated sizes (10% of each is used for training).
    #[arg(long, default_value = "500,1000,2000")]
    pub sizes: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value = "ccrm,crm,ke,rf")]
    pub models: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub train_fraction: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Write 0 for wall times so reruns are byte-identical.
    #[arg(long)]
    pub no_timings: bool,
    #[command(flatten)]
    pub model_args: ModelArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Random,
    Chronological,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct HoldoutArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "ccrm,rf")]
    pub models: String,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    /// Exact training size, overriding the fraction.
    #[arg(long)]
    pub train_count: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Chronological)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Row label in the printed tables (default: the response name).
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(subcommand)]
    pub kind: PlotKind,
}

#[derive(Debug, Subcommand)]
pub enum PlotKind {
    /// One gray rectangle per observation: predictor span by response span.
    Rectangles {
        #[arg(long = "in")]
        input: PathBuf,
        /// Predictor on the horizontal axis (default: the first).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Observed (circles) against predicted (triangles), center and radius panels.
    PredScatter {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
}
