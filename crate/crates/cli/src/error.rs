use std::path::PathBuf;

use thiserror::Error;

use crate::summary::ReportError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] refchain_core::Error),

    /// The scenario or one of the files it references is malformed.
    #[error("{}: {message}", path.display())]
    Scenario { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Report(#[from] ReportError),
}

impl CliError {
    pub fn scenario(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration and wiring problems, 3 for a runtime fault stop,
    /// 4 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(refchain_core::Error::FaultStop { .. }) => 3,
            CliError::Core(_) | CliError::Scenario { .. } | CliError::Report(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Csv { source, .. } => match source.kind() {
                csv::ErrorKind::Io(_) => 4,
                _ => 2,
            },
        }
    }
}
