use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] v6taxon_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("missing day file {}", .0.display())]
    MissingDayFile(PathBuf),
    #[error("corrupt day file {}: {reason}", path.display())]
    CorruptDayFile { path: PathBuf, reason: String },
    #[error("invalid day {0:?} (expected YYYYMMDD or YYYYMMDD-YYYYMMDD)")]
    Day(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// 1 for usage errors, 2 for everything data related.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Day(_) => 1,
            _ => 2,
        }
    }
}
