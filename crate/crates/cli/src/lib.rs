//! Command-line front end for `photon-gauge-core`.
//!
//! Each subcommand reads a [`RunConfig`], writes its data files and plot
//! scripts into the output directory, and finishes with `run_summary.json`
//! listing every assertion with its measured value and tolerance. The
//! summary is the only file that records wall time, so repeated runs with
//! the same configuration produce byte-identical data files.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use output::{Assertion, Report, RunSummary, Sink};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PHOTON_GAUGE_KIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "photon-gauge-kit", version, about = "Geometric gauge analysis of localized photon states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; every key has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    /// Override a configuration key, e.g. `--set field.m=2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Spin/orbital decomposition of the helicity basis over θ.
    Basis,
    /// Gauge potential maps, string flux and the monopole curl test.
    Gauge,
    /// Two-grid checks of the position operator.
    Operators,
    /// Position-space field synthesis.
    Field,
    /// Full acceptance suite.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Gauge => "gauge",
            Command::Operators => "operators",
            Command::Field => "field",
            Command::Verify => "verify",
        }
    }
}

pub fn execute(command: Command, config: &RunConfig, sink: &Sink) -> Result<Report> {
    match command {
        Command::Basis => commands::basis::run(config, sink),
        Command::Gauge => commands::gauge::run(config, sink),
        Command::Operators => commands::operators::run(config, sink),
        Command::Field => commands::field::run(config, sink),
        Command::Verify => commands::verify::run(config, sink),
    }
}

/// Runs a command and writes `run_summary.json` into the sink.
pub fn run(command: Command, config: &RunConfig, sink: &Sink) -> Result<Report> {
    let start = Instant::now();
    let mut report = execute(command, config, sink).with_context(|| format!("{} failed", command.name()))?;
    report.files.push("run_summary.json".into());
    let summary = RunSummary {
        command: command.name(),
        config,
        assertions: &report.assertions,
        passed: report.passed(),
        files: &report.files,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    sink.json("run_summary.json", &summary)?;
    Ok(report)
}

/// Sizes the global rayon pool from [`THREADS_ENV`] if it is set.
pub fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value.trim().parse().with_context(|| format!("{THREADS_ENV}={value} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}
