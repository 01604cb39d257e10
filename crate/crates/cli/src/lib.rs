//! Command-line front end: experiment configuration, file formats and the
//! subcommands wrapping the library.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::ExperimentConfig;
use crate::error::CliResult;

/// Room scheduling, QUBO reformulation and annealer calibration experiments.
#[derive(Debug, Parser)]
#[command(name = "annealsched", version)]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (the ANNEALSCHED_OUT_DIR environment variable wins).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Top-level seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Campus scaling factor.
    #[arg(long, global = true)]
    scale: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a booking request stream.
    GenStream(commands::GenStreamArgs),
    /// Schedule a stream in one batch with one method.
    Schedule(commands::ScheduleArgs),
    /// Filling-factor failure curves of several methods on identical streams.
    Compare(commands::CompareArgs),
    /// Build an MVVC model from a graph file.
    Qubo(commands::QuboArgs),
    /// Sample or exactly solve a model file.
    Solve(commands::SolveArgs),
    /// Calibrate a simulated annealer on a graph.
    Calibrate(commands::CalibrateArgs),
    /// Quantile energies against annealing length.
    SweepAnneal(commands::SweepArgs),
}

pub fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(scale) = cli.scale {
        cfg.scale = scale;
    }
    cfg.validate()?;
    let out_dir = cfg.resolve_output_dir(cli.out_dir.as_deref());
    let ctx = Context { cfg, out_dir };
    match &cli.command {
        Command::GenStream(a) => commands::gen_stream(&ctx, a),
        Command::Schedule(a) => commands::schedule(&ctx, a),
        Command::Compare(a) => commands::compare(&ctx, a),
        Command::Qubo(a) => commands::qubo(&ctx, a),
        Command::Solve(a) => commands::solve(&ctx, a),
        Command::Calibrate(a) => commands::calibrate(&ctx, a),
        Command::SweepAnneal(a) => commands::sweep_anneal(&ctx, a),
    }
}
