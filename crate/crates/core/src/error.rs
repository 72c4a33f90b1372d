use std::path::PathBuf;

use thiserror::Error;

use crate::env::ActionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("environment is terminal; call reset before stepping")]
    StepAfterTerminal,
    #[error("action {action} out of range for {action_count} actions")]
    InvalidAction { action: usize, action_count: usize },
    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),
    #[error("malformed MDP table at line {line}: {message}")]
    MdpFormat { line: usize, message: String },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("episodic memory holds no entry for action {}", .0.0)]
    NoEntries(ActionId),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint grids differ across runs: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    GridMismatch(Vec<PathBuf>),
    #[error("run failed (seed {seed}, step {step}): {source}")]
    Run {
        seed: u64,
        step: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Errors caused by bad user input rather than a failure mid-run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownEnvironment(_) | Error::MdpFormat { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
