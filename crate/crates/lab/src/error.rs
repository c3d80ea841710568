use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed CSV in {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("invalid reference curve: {0}")]
    Reference(String),
    #[error("grid mismatch: no reference point within {max_gap} K of T = {t} K")]
    GridMismatch { t: f64, max_gap: f64 },
    #[error("{0}")]
    Metric(String),
    #[error(transparent)]
    Sim(#[from] dimerlab::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// 2 for configuration and usage problems, 3 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
