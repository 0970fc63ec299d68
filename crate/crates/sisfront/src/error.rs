use std::path::Path;

use sisfront_core::{AnalysisError, ModelError, SemiWaveError, SolverError, SpectralError, SteadyError};
use thiserror::Error;

/// Top-level failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed config or invalid model (exit 1).
    #[error("{0}")]
    Config(String),
    /// Solver or IO failure (exit 2).
    #[error("{0}")]
    Numeric(String),
    /// Classification could not decide (exit 3).
    #[error("{0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Numeric(format!("{}: {err}", path.display()))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Model(m) => m.into(),
            SolverError::Numerics(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Model(m) => m.into(),
            SpectralError::Argument(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<SemiWaveError> for CliError {
    fn from(e: SemiWaveError) -> Self {
        match e {
            SemiWaveError::Model(m) => m.into(),
            SemiWaveError::Parameters(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<SteadyError> for CliError {
    fn from(e: SteadyError) -> Self {
        match e {
            SteadyError::Model(m) => m.into(),
            SteadyError::Precondition(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solver(s) => s.into(),
            AnalysisError::Spectral(s) => s.into(),
            e @ AnalysisError::InconclusiveProbe { .. } => CliError::Inconclusive(e.to_string()),
            e @ (AnalysisError::Precondition(_) | AnalysisError::Bracket(_) | AnalysisError::Window { .. }) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}
