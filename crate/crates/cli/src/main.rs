use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::Config;

/// Cervix ultrasound marker pipeline: preprocessing, CL/ACA extraction,
/// evaluation against ground truth, and preterm classification.
#[derive(Debug, Parser)]
#[command(name = "cervix", version)]
pub struct Cli {
    /// Worker threads for per-file work (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run configuration as `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Remove colour annotations from ultrasound images and resize them.
    Preprocess(PreprocessArgs),
    /// Measure CL and ACA on every mask in a directory.
    Extract(ExtractArgs),
    /// Regress estimated markers on ground truth.
    Evaluate(EvaluateArgs),
    /// Cross-validate classifiers on a cohort CSV.
    Classify(ClassifyArgs),
    /// Write synthetic shapes or a synthetic cohort.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// HSV ranges file, one `h_lo h_hi s_lo s_hi v_lo v_hi` per line.
    #[arg(long)]
    pub ranges: Option<PathBuf>,
    /// Dilation radius in pixels.
    #[arg(long)]
    pub dilate: Option<usize>,
    /// Output side length in pixels.
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub masks: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Pixel spacing in mm per pixel; CL is reported in mm when given.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// top, bottom, left or right.
    #[arg(long)]
    pub anterior: Option<String>,
    /// min_axis or max_axis.
    #[arg(long)]
    pub proximal: Option<String>,
    /// Outline sampling spacing for the skeleton, pixels.
    #[arg(long)]
    pub sample_spacing: Option<f64>,
    #[arg(long)]
    pub smooth_window: Option<usize>,
    #[arg(long)]
    pub window_frac: Option<f64>,
    /// Also write each centerline as `x,y` CSV into this directory.
    #[arg(long)]
    pub centerlines: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub est: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// I, II, I+II or all.
    #[arg(long, default_value = "I+II")]
    pub view: String,
    /// gnb, knn, tree, svm or all.
    #[arg(long, default_value = "all")]
    pub model: String,
    /// Neighbours for knn.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Text report; a CSV with the same stem is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// shapes or cohort.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cohort size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Preterm fraction of the cohort.
    #[arg(long)]
    pub balance: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let jobs = cfg.pick(cli.jobs, "jobs")?;
    let pool = commands::pool(jobs)?;
    match cli.command {
        Command::Preprocess(a) => commands::preprocess(&a, &cfg, &pool),
        Command::Extract(a) => commands::extract(&a, &cfg, &pool),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Classify(a) => commands::classify(&a, &cfg, &pool),
        Command::Synth(a) => commands::synth(&a, &cfg),
    }
}
