//! `rwre`: simulate walks in random environment, estimate the environment
//! c.d.f. from a single trajectory, and replicate the simulation study.
//!
//! Exit codes: 0 success, 2 configuration error, 3 resource limit, 4
//! degenerate data, 5 regime mismatch.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "rwre", version, about = "Estimate the environment law of a random walk in random environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trajectory and write its left-step counts Z.
    Simulate(SimulateArgs),
    /// Run the adaptive c.d.f. estimator on a saved trajectory.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment or a figure preset.
    Replicate(ReplicateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Walk,
    Branching,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Environment law as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub spec: String,
    /// Target site n.
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "RWRE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "walk")]
    pub engine: EngineArg,
    /// Step budget of the walk engine.
    #[arg(long, default_value_t = rwre::walk_sim::DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// A trajectory written by `rwre simulate` (`.bin` for the binary format).
    pub input: PathBuf,
    /// `auto` for z = log n, or a positive number.
    #[arg(long, default_value = "auto")]
    pub z: String,
    /// Largest candidate resolution M.
    #[arg(long, default_value_t = rwre::lepskii::DEFAULT_M_CAP)]
    pub m_cap: usize,
    /// Also write every candidate estimate under `estimates/`.
    #[arg(long)]
    pub all_estimates: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
#[group(id = "mode", required = true, multiple = false)]
pub struct ReplicateMode {
    /// Risk table for a preset (default table1-kappa1) or for --config.
    #[arg(long, num_args = 0..=1, default_missing_value = "table1-kappa1", value_name = "PRESET")]
    pub table1: Option<String>,
    /// Figure bundle for a preset (fig1..fig6, or `all`) or for --config.
    #[arg(long, num_args = 0..=1, default_missing_value = "all", value_name = "PRESET")]
    pub figures: Option<String>,
    /// Asymptotic normality of the moment estimator.
    #[arg(long)]
    pub clt: bool,
    /// Coverage of the moment deviation bound.
    #[arg(long)]
    pub concentration: bool,
    /// Occupation counts against the invariant law.
    #[arg(long)]
    pub occupation: bool,
}

#[derive(Args)]
pub struct ReplicateArgs {
    #[command(flatten)]
    pub mode: ReplicateMode,
    /// Experiment configuration as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub config: Option<String>,
    /// Full-scale replication counts instead of desk-scale defaults.
    #[arg(long)]
    pub paper_scale: bool,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Base seed (defaults to 1).
    #[arg(long, env = "RWRE_SEED")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Estimate(args) => commands::estimate::run(&args),
        Command::Replicate(args) => commands::replicate::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
