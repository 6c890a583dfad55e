//! The `mwrc` command line: rate regions, phase diagrams, Monte-Carlo runs
//! and self-checks, each written as CSV under `--out`.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{CommonRateArgs, PhaseArgs, RegionArgs, SelfcheckArgs, SimulateArgs};
pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mwrc", version, about = "Coding and rate regions for multi-way relay channels over finite fields")]
pub struct Cli {
    /// Master seed; overrides the seed of a config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving the CSV files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for trials and sweeps (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity, separate-decoding and CDF regions of a binary two-user channel.
    Region(RegionArgs),
    /// Where separate decoding and CDF are optimal, over a grid of user crossovers.
    Phase(PhaseArgs),
    /// Monte-Carlo error rates against blocklength.
    Simulate(SimulateArgs),
    /// The largest rate every user can send at once.
    CommonRate(CommonRateArgs),
    /// Exhaustive checks of the field arithmetic and the code ensemble.
    Selfcheck(SelfcheckArgs),
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Argument("--threads must be at least 1".to_string())),
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Argument(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Region(a) => commands::region(a, cli),
        Command::Phase(a) => commands::phase(a, cli),
        Command::Simulate(a) => commands::simulate(a, cli),
        Command::CommonRate(a) => commands::common_rate(a, cli),
        Command::Selfcheck(a) => commands::selfcheck(a, cli),
    })
}
