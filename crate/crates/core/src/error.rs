use std::path::PathBuf;

use thiserror::Error;

/// Failures of the thermal network model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HenError {
    #[error("temperature cross: end differences {dt_hot_end} K and {dt_cold_end} K must both be positive")]
    TemperatureCross { dt_hot_end: f64, dt_cold_end: f64 },
    #[error("network solve did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
}

/// Failures while loading or validating a scenario document.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid value at `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Top-level error of the batch commands.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] HenError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(
        "degenerate reference: the always-clean case saves {0} over the never-cleaned case, \
         so there is no positive maximum potential saving to divide by"
    )]
    DegenerateReference(f64),
    #[error("missing artifact {0}")]
    MissingArtifact(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to encode {path}: {message}")]
    Encode { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scenario(ScenarioError::Io { .. }) => 4,
            Error::Scenario(_) | Error::Input(_) | Error::DegenerateReference(_) => 2,
            Error::Model(HenError::InvalidTopology(_)) => 2,
            Error::Model(_) => 3,
            Error::MissingArtifact(_) | Error::Io { .. } | Error::Encode { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
