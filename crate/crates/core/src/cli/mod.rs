//! Command-line front end. Exit codes: 0 certified stable (or success for
//! the non-certifying commands), 2 inconclusive, 1 error.

use clap::{Parser, Subcommand};

use crate::error::Error;

pub mod commands;
pub mod config;

pub use commands::certify_report;
pub use config::{Mode, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "jsrcert", version, about = "Data-driven stability certificates for switched linear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random system with entries uniform in [-1, 1].
    GenSystem(RunConfig),
    /// Sample initial states and switching words, write output trajectories.
    Simulate(RunConfig),
    /// Solve the scenario program and evaluate the bounds.
    Certify(RunConfig),
    /// Estimate the pathwise observability index from trajectories.
    EstimateIndex(RunConfig),
    /// Enumeration bracket on the joint spectral radius.
    OracleJsr(RunConfig),
    /// Sample sizes needed for a target accuracy.
    SampleComplexity(RunConfig),
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub source: Error,
}

impl StageError {
    pub(crate) fn config(msg: &str) -> Self {
        Self {
            stage: "config",
            source: Error::InvalidParameter(msg.to_string()),
        }
    }
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {}

/// Caps rayon's pool at `JSRCERT_THREADS` when set.
pub fn configure_threads() -> Result<(), StageError> {
    if let Ok(value) = std::env::var("JSRCERT_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| StageError::config(&format!("JSRCERT_THREADS = {value:?} is not a positive integer")))?;
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<i32, StageError> {
    configure_threads()?;
    let resolve = |flags: RunConfig| RunConfig::resolve(flags).map_err(|source| StageError { stage: "config", source });
    match cli.command {
        Command::GenSystem(c) => commands::gen_system(resolve(c)?),
        Command::Simulate(c) => commands::simulate(resolve(c)?),
        Command::Certify(c) => commands::certify(resolve(c)?),
        Command::EstimateIndex(c) => commands::estimate_index(resolve(c)?),
        Command::OracleJsr(c) => commands::oracle_jsr(resolve(c)?),
        Command::SampleComplexity(c) => commands::sample_complexity(resolve(c)?),
    }
}
