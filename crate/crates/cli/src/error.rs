use std::io;

/// Everything a subcommand can fail with.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ehcap_core::Error),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed sequence file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// 3 for numerical non-convergence, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
