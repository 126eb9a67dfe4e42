use std::path::PathBuf;

use uoh_core::ErrorKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] uoh_core::Error),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}: {message}", .path.display())]
    Row { path: PathBuf, line: u64, message: String },
    #[error("{}: {message}", .path.display())]
    File { path: PathBuf, message: String },
    #[error("configuration {}: {message}", .path.display())]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Core(e) => e.kind(),
            Error::Config { .. } | Error::Usage(_) => ErrorKind::Config,
            Error::Io { .. } | Error::Row { .. } | Error::File { .. } => ErrorKind::Input,
        }
    }

    /// Process exit status: 2 input, 3 numerical, 4 configuration.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Config => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
