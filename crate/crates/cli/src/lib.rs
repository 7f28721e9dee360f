//! Command-line front end for `dimgrid`.
//!
//! Every subcommand is a plain function over a validated configuration so it
//! can be driven without the argument parser. Reports are single JSON
//! documents (or CSV tables for `generate` and `benchmark`) that always carry
//! the library version and the seed.
//!
//! Exit codes: 0 on success, 2 when a file cannot be read or written, 3 for
//! an invalid configuration.

pub mod args;
mod commands;

use std::fmt;

pub use commands::{
    cmd_benchmark, cmd_bounds, cmd_boundary, cmd_calibrate, cmd_estimate, cmd_generate, generate, open_cache, read_cloud,
    render_bounds_text, run, run_estimate, BenchmarkRow, BoundaryOutput, CalibrateOutput, EstimateConfig,
    EstimateOutput, Generated, Timing,
};

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub(crate) fn io(context: impl fmt::Display, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dimgrid::Error> for CliError {
    fn from(e: dimgrid::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}
