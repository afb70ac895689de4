use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] spinscatter::Error),

    #[error("{0} acceptance criteria failed")]
    Acceptance(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 config, 3 io, 4 numerical, 1 for a failing self-test.
    pub fn exit_code(&self) -> i32 {
        use spinscatter::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(E::InvalidInput(_)) => 2,
            CliError::Core(E::Csv(_)) => 3,
            CliError::Core(_) => 4,
            CliError::Acceptance(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
