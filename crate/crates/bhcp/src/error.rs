use std::io;
use std::path::PathBuf;

/// Everything the driver can fail with, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Core(#[from] bhcp_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv { path: path.into(), source }
    }

    /// 1 for numerical failures, 2 for bad usage or input.
    pub fn exit_code(&self) -> i32 {
        use bhcp_core::Error as E;
        match self {
            CliError::Core(
                E::NonFinite(_)
                | E::NonRealReconstruction { .. }
                | E::QuadratureFailure { .. }
                | E::AmplificationOverflow { .. }
                | E::ZeroReference,
            ) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
