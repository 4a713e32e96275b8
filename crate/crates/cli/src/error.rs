use std::path::PathBuf;

/// Anything that stops a run. Each kind maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or structurally invalid configuration.
    #[error("{0}")]
    Config(String),
    /// Parameters that parse but describe an impossible experiment.
    #[error("invalid physics: {0}")]
    Physics(#[from] cvqt_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing table: {0}")]
    Table(#[from] csv::Error),
    #[error("encoding report: {0}")]
    Encode(#[from] toml::ser::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io { .. } | CliError::Table(_) | CliError::Encode(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
