//! Experiment driver for the projected Langevin sampler.
//!
//! Every subcommand reads a JSON experiment config and writes CSV tables,
//! SVG plots, and a `summary.json` into the output directory. Exit codes:
//! 0 on success, 1 on validation or runtime failure, 2 on usage errors.

use clap::{Args, Parser, Subcommand};
use plmc::cli::{run_study, StudyKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "plmc-lab",
    version,
    about = "Projected Langevin sampling studies on convex bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV, SVG, and summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's worker thread count (0 = library default).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the projected sampler and record iterates.
    Sample(Common),
    /// Couple sampler and reflected reference diffusion on one Brownian
    /// path; check the per-step discretization bound.
    CoupledError(Common),
    /// Boundary local time of the reference diffusion against its
    /// closed-form bound.
    Localtime(Common),
    /// Gaussian warm-start divergence bound plus start-quality estimates.
    Warmstart(Common),
    /// Squared Wasserstein distance between the chain tail and an exact
    /// oracle sampler.
    W2(Common),
    /// Step size and iteration count reaching a target accuracy.
    Schedule(Common),
}

impl Command {
    fn split(&self) -> (StudyKind, &Common) {
        match self {
            Command::Sample(c) => (StudyKind::Sample, c),
            Command::CoupledError(c) => (StudyKind::CoupledError, c),
            Command::Localtime(c) => (StudyKind::LocalTime, c),
            Command::Warmstart(c) => (StudyKind::WarmStart, c),
            Command::W2(c) => (StudyKind::W2, c),
            Command::Schedule(c) => (StudyKind::Schedule, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = cli.command.split();
    match run_study(kind, &common.config, &common.out, common.seed, common.threads) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
