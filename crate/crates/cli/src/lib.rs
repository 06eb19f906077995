//! Library half of the `pfca` command-line tool: context file formats,
//! machine-readable run reports, pipeline execution, the benchmark sweep,
//! and one-hot scaling of categorical CSV data.

pub mod bench;
pub mod io;
pub mod report;
pub mod runner;
pub mod scale;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] pfca_core::EngineError),
    #[error(transparent)]
    Context(#[from] pfca_core::ContextError),
    #[error(transparent)]
    He(#[from] pfca_core::HeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Exit codes: 1 verification or runtime failure, 2 usage, 3 I/O or
    /// parse. Success is 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::Io(_) => 3,
            _ => 1,
        }
    }
}
