use std::path::PathBuf;

use minimax_core::libsvm::LoadError;
use minimax_core::optimizers::RunError;
use minimax_core::oracle::OracleError;
use minimax_core::problems::ProblemError;
use minimax_core::schedule::ScheduleError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dataset `{path}` not found (tried: {})", .tried.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    DatasetNotFound { path: PathBuf, tried: Vec<PathBuf> },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{path}: expected {expected_n} rows and {expected_d} features, found {n} x {d}")]
    DatasetShape {
        path: PathBuf,
        expected_n: usize,
        expected_d: usize,
        n: usize,
        d: usize,
    },
    #[error("problem construction failed: {0}")]
    Problem(#[from] ProblemError),
    #[error("schedule: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("estimating problem constants: {0}")]
    Estimate(#[source] OracleError),
    #[error("{optimizer}, seed {seed}: {source}")]
    Run {
        optimizer: &'static str,
        seed: u64,
        #[source]
        source: RunError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}, line {line}: {message}")]
    BadTrace {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
