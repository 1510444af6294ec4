use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    Missing(String),
}

/// Failures that stop a run before any verdict (exit status 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("incomplete configuration: {0}")]
    Incomplete(String),
    #[error("cannot set up the experiment: {0}")]
    Setup(#[from] ftct_core::Error),
}
