//! Command-line runner for `disclab-core`.
//!
//! Exit codes: 0 on success, 1 on usage or library errors, 2 when a checked
//! identity or acceptance criterion fails.

pub mod commands;
pub mod config;
pub mod output;
pub mod suite;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::Params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] disclab_core::Error),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Core(_) => 1,
            Self::Assertion(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "disclab", version, about = "Experiments on irregularities of distribution")]
pub struct Cli {
    /// Print one JSON record per result instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the result to this file (CSV when it ends in .csv, JSON otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a point set.
    Gen(Params),
    /// Norms of the discrepancy function.
    Disc(Params),
    /// Haar coefficients of the discrepancy function.
    Haar(Params),
    /// Riesz-product certificates: talagrand, halasz or sine.
    Riesz(Params),
    /// The Roth lower-bound chain.
    Chain(Params),
    /// Minimise the sup norm of a ±1 hyperbolic sum.
    Smallball(Params),
    /// Expected sup norm of random hyperbolic sums.
    Mc(Params),
    /// Norms of the Beck coincidence sum.
    Beck(Params),
    /// Run the acceptance suite.
    Suite(Params),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gen(_) => "gen",
            Self::Disc(_) => "disc",
            Self::Haar(_) => "haar",
            Self::Riesz(_) => "riesz",
            Self::Chain(_) => "chain",
            Self::Smallball(_) => "smallball",
            Self::Mc(_) => "mc",
            Self::Beck(_) => "beck",
            Self::Suite(_) => "suite",
        }
    }

    fn into_params(self) -> Params {
        match self {
            Self::Gen(p)
            | Self::Disc(p)
            | Self::Haar(p)
            | Self::Riesz(p)
            | Self::Chain(p)
            | Self::Smallball(p)
            | Self::Mc(p)
            | Self::Beck(p)
            | Self::Suite(p) => p,
        }
    }
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Fails only if the pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let sink = output::Sink {
        json: cli.json,
        out: cli.out,
    };
    let name = cli.command.name();
    let params = cli.command.into_params().resolve()?;
    commands::dispatch(name, &params, &sink)
}
