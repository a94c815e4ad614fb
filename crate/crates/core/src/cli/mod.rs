//! Batch experiment surface behind the `synthpop` binary.
//!
//! `synthpop <preprocess|train|generate|evaluate|sweep|synth-data> --config <file> [--seed N] [--out DIR]`
//!
//! Each subcommand reads its own section of a JSON [`RunConfig`], validates
//! it before touching the output directory, and writes every output or none.

mod commands;
mod config;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{
    EvaluateConfig, GenerateConfig, NamedPath, PreprocessConfig, RunConfig, SearchSection,
    SweepConfig, SynthDataConfig, TrainSection,
};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "synthpop",
    version,
    about = "Synthetic population generation with deep generative models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Drop sparse columns, bin numerical ones, and split into train/validation/test.
    Preprocess(CommonArgs),
    /// Train a model (optionally by random search) and save it.
    Train(CommonArgs),
    /// Sample agents from a saved model.
    Generate(CommonArgs),
    /// Fit metrics, zero accounting and scatter plots for generated tables.
    Evaluate(CommonArgs),
    /// Ratio curves and the dimension sweep over a ladder of subsets.
    Sweep(CommonArgs),
    /// Draw a population from a known ground-truth distribution.
    SynthData(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Preprocess(a)
            | Command::Train(a)
            | Command::Generate(a)
            | Command::Evaluate(a)
            | Command::Sweep(a)
            | Command::SynthData(a) => a,
        }
    }
}

/// Loads the config, applies flag overrides and runs the subcommand.
/// Returns the paths written into the output directory.
pub fn run(command: &Command) -> Result<Vec<PathBuf>> {
    let args = command.common();
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    run_config(command, &config)
}

/// Runs a subcommand against an already loaded config.
pub fn run_config(command: &Command, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = config.out_dir();
    match command {
        Command::Preprocess(_) => commands::preprocess(config, &out),
        Command::Train(_) => commands::train(config, &out),
        Command::Generate(_) => commands::generate(config, &out),
        Command::Evaluate(_) => commands::evaluate(config, &out),
        Command::Sweep(_) => commands::sweep(config, &out),
        Command::SynthData(_) => commands::synth_data(config, &out),
    }
}
