use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] imcmc_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Error payload written to standard error under `--json-errors`.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn parse(path: impl AsRef<Path>, line: u64, message: impl Into<String>) -> Self {
        HarnessError::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// 3 for numerical failures, 2 for everything caused by inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(
                imcmc_core::Error::Numeric(_)
                | imcmc_core::Error::DegenerateSeries(_)
                | imcmc_core::Error::InsufficientData(_),
            ) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Parse { .. } => "parse",
            HarnessError::Io { .. } => "io",
            HarnessError::Core(e) => match e {
                imcmc_core::Error::Domain(_) => "domain",
                imcmc_core::Error::Numeric(_) => "numeric",
                imcmc_core::Error::Config(_) => "config",
                imcmc_core::Error::DegenerateSeries(_) => "degenerate_series",
                imcmc_core::Error::InsufficientData(_) => "insufficient_data",
            },
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            line: match self {
                HarnessError::Parse { line, .. } => Some(*line),
                _ => None,
            },
        }
    }
}
