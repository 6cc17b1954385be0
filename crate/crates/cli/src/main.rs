//! Command-line front end: dataset generation, training, evaluation, sweeps,
//! point-set analysis, and PLY export.
//!
//! Every run is reproducible from its arguments: seeds drive all randomness
//! and file outputs (CSV, JSON, PLY, checkpoints) are byte-identical across
//! reruns and worker counts. Exit codes: 0 success, 2 invalid arguments or
//! missing inputs, 3 I/O failure, 4 training divergence (partial history is
//! saved first).

mod commands;
mod ply;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use terrain_pointnet::datagen::DatasetSpec;
use terrain_pointnet::{Error, Result};

#[derive(Parser)]
#[command(name = "terrain-pointnet", version, about = "Terrain classification on synthetic depth point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset directory
    Generate(GenerateArgs),
    /// Train a classifier and write checkpoint.bin + history.csv
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset split
    Eval(EvalArgs),
    /// Retrain across global feature lengths, one history file per length
    Sweep(SweepArgs),
    /// Extract critical and upper-bound point sets from one sample
    Analyze(AnalyzeArgs),
    /// Export one sample as a colored PLY file
    Export(ExportArgs),
}

/// Scale presets. Desk runs in minutes on one core; full matches the
/// reference experiment scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    Desk,
    Full,
}

impl Profile {
    fn dataset_spec(self, seed: u64) -> DatasetSpec {
        match self {
            Profile::Desk => DatasetSpec::desk(seed),
            Profile::Full => DatasetSpec::full(seed),
        }
    }

    fn default_epochs(self) -> usize {
        match self {
            Profile::Desk => 30,
            Profile::Full => 60,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Directional,
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    Train,
    Test,
    All,
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory (manifest.json, points.bin, labels.bin, split.bin)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    /// Total sample count (overrides the profile)
    #[arg(long)]
    samples: Option<usize>,
    /// Points per sample after downsampling (overrides the profile)
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset directory produced by `generate`
    #[arg(long)]
    data: PathBuf,
    /// Output directory for checkpoint.bin and history.csv
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long, value_enum, default_value_t = VariantArg::Directional)]
    variant: VariantArg,
    /// Global feature length (directional variant only)
    #[arg(long, default_value_t = 256)]
    feature_length: usize,
    /// Epoch cap (overrides the profile)
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Stop after the first epoch whose test accuracy reaches this value
    #[arg(long)]
    early_stop: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    /// Output directory for history_<length>.csv files
    #[arg(long)]
    out: PathBuf,
    /// Feature lengths to train, comma separated
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024")]
    lengths: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    early_stop: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Output directory for critical.ply, upper_bound.ply, report.json
    #[arg(long)]
    out: PathBuf,
    /// Sample index into the dataset
    #[arg(long, default_value_t = 0)]
    sample: usize,
    /// Candidate cube edge length, centered on the cloud
    #[arg(long, default_value_t = 1.0)]
    cube_edge: f64,
    /// Candidate cube vertices per axis
    #[arg(long, default_value_t = 40)]
    cube_resolution: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    data: PathBuf,
    /// Output PLY file path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    sample: usize,
}

/// Worker count from `TERRAIN_PN_THREADS`, default 1. Outputs do not depend
/// on it; it only trades wall time.
fn init_threads() -> Result<()> {
    let threads = match std::env::var("TERRAIN_PN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                Error::InvalidParam(format!("TERRAIN_PN_THREADS must be a positive integer, got {v:?}"))
            })?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParam(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Train(args) => commands::train_cmd(args),
        Command::Eval(args) => commands::eval(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Analyze(args) => commands::analyze(args),
        Command::Export(args) => commands::export(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads().and_then(|()| run(cli)) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Io(_) => 3,
            Error::Diverged { .. } => 4,
            _ => 2,
        };
        std::process::exit(code);
    }
}
