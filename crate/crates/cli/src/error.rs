use std::path::PathBuf;

use sparsiqc::analysis::AnalysisError;
use sparsiqc::generate::GenerateError;
use sparsiqc::lmi::LmiError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    /// Both forms were solved and their verdicts differ.
    #[error("lumped and sparse verdicts disagree")]
    VerdictMismatch,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::VerdictMismatch => 3,
            _ => 1,
        }
    }
}
