//! `overlapctl` — pipeline driver for controlled vocabulary-overlap
//! experiments: corpus statistics, index remapping, similarity-based overlap
//! partitioning, layer sweeps, embedding-similarity analysis and McNemar
//! comparisons.

mod cli;
mod commands;
mod config;
mod output;
mod partition_io;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::FileConfig;

fn run() -> anyhow::Result<()> {
    let args = Cli::parse();
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    match &args.command {
        Command::Stats(a) => commands::stats(a, &mut cfg),
        Command::Remap(a) => commands::remap(a, &mut cfg),
        Command::Invert(a) => commands::invert(a, &mut cfg),
        Command::Partition(a) => commands::partition(a, &mut cfg),
        Command::Layersweep(a) => commands::layersweep(a, &mut cfg),
        Command::Analyze(a) => commands::analyze(a, &mut cfg),
        Command::Mcnemar(a) => commands::mcnemar(a, &mut cfg),
        Command::Synth(a) => commands::synth(a, &mut cfg),
        Command::Compress(a) => commands::compress(a, &mut cfg),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}
