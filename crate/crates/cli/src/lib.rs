//! Library side of the `conic-extrema` command-line tool: job description,
//! command execution, JSON schemas and SVG figures.

pub mod commands;
pub mod schema;
pub mod svg;

use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Exparabola,
    MaxParabola,
    LemmaShrink,
    MinHorocycle,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub command: Command,
    pub input: PathBuf,
    pub output: PathBuf,
    pub svg: Option<PathBuf>,
    pub seed: u64,
    /// Angle grid for the minimal horocycle solver.
    pub grid: Option<usize>,
    /// Multi-start count for the maximal parabola solver.
    pub starts: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(conic_extrema::Error),
    #[error("{0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
}

impl From<conic_extrema::Error> for CliError {
    fn from(e: conic_extrema::Error) -> Self {
        match e {
            conic_extrema::Error::VerificationFailure { .. } => CliError::Verification(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io { .. } | CliError::Parse(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Domain(_) => "domain",
            CliError::Verification(_) => "verification",
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
        }
    }

    /// Single-line JSON diagnostic.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

/// Parses `CONIC_EXTREMA_THREADS`; `0`, unset or empty means automatic.
pub fn thread_limit(value: Option<&str>) -> Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Parse(format!("CONIC_EXTREMA_THREADS must be a nonnegative integer, got {v:?}"))),
    }
}

/// Runs a job inside a thread pool of at most `threads` workers (`0` = auto).
pub fn run(job: &Job, threads: usize) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Parse(format!("cannot build thread pool: {e}")))?;
    pool.install(|| commands::execute(job))
}
