use std::path::PathBuf;

use ifp_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("iteration diverged: {0}")]
    Diverged(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const NOT_CONVERGED: i32 = 4;
    pub const IO: i32 = 5;
    pub const VERIFICATION: i32 = 6;
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Format { .. } => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Diverged(_) => exit::DIVERGED,
            CliError::NotConverged(_) => exit::NOT_CONVERGED,
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Core(e) => match e {
                CoreError::LimitNotConverged { .. }
                | CoreError::KrauseNotConverged { .. }
                | CoreError::EpsilonNotConverged { .. } => exit::NOT_CONVERGED,
                _ => exit::CONFIG,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
