//! Command implementations behind the `growthbound` binary.
//!
//! Every command returns plain data (reports, CSV rows, SVG text) so that the
//! binary only parses arguments, picks an output format and maps errors to
//! exit codes.

pub mod checks;
pub mod demo;
pub mod figure;
pub mod report;
pub mod svg;

use std::fmt;

use growthbound::Error;

/// Exit status of the binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    Usage = 2,
    SolverFailure = 3,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Solver(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Verification(_) => ExitStatus::VerificationFailed,
            CliError::Solver(_) => ExitStatus::SolverFailure,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::DimensionMismatch(_)
            | Error::Io(_)
            | Error::Json(_) => CliError::Usage(e.to_string()),
            Error::Certification(_) => CliError::Verification(e.to_string()),
            Error::SingularMatrix { .. }
            | Error::NonConvergence { .. }
            | Error::Unbounded
            | Error::Infeasible
            | Error::IterationLimit(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Thread cap from `GROWTHBOUND_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("GROWTHBOUND_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}
