//! Experiment harness: configuration, runs, grid search, rate studies,
//! trace files and plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod plot;
pub mod rate;
pub mod trace;

pub use minimax_core as core;

pub use config::{ConfigError, ExperimentConfig, RawConfig};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentReport};
pub use grid::{grid_search, GridReport};
pub use plot::{emit_plot, PlotSpec};
pub use rate::{rate_study, RateReport};
pub use trace::{read_trace, TraceRecord};

use std::path::Path;

/// Reads a configuration file and applies `key = value` overrides.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut raw = RawConfig::parse(&text)?;
    for (key, value) in overrides {
        raw.set(key, value.clone());
    }
    Ok(ExperimentConfig::from_raw(&raw)?)
}
