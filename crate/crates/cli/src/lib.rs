//! Config-driven runner for the `uniqlab-core` experiments.
//!
//! A run is described by an [`ExperimentConfig`]: a command name, a params
//! object checked against that command's schema, and a seed. [`run`]
//! returns a [`ResultTable`] whose provenance carries the SHA-256 of the
//! resolved config, and [`emit`] writes it as CSV or JSON.

pub mod commands;
pub mod config;
pub mod table;

use thiserror::Error;

pub use commands::run;
pub use config::{Command, ExperimentConfig, Format, Params};
pub use table::{emit, Cell, Provenance, ResultTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {command} config: {message}")]
    Validation { command: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Pair(#[from] uniqlab_core::PairError),
    #[error(transparent)]
    Product(#[from] uniqlab_core::ProductError),
    #[error(transparent)]
    Interpolation(#[from] uniqlab_core::InterpolationError),
    #[error(transparent)]
    Uniqueness(#[from] uniqlab_core::UniquenessError),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io {
            path: "<buffer>".into(),
            message: e.to_string(),
        }
    }
}

impl CliError {
    /// 2 for rejected input, 1 for failures during computation or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            _ => 1,
        }
    }
}
