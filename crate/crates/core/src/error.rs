use thiserror::Error;

/// Errors raised by code construction, channel handling and numeric evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Invalid arguments or a violated precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Mathematically undefined operation (division by zero, out-of-range probability).
    #[error("domain error: {0}")]
    Domain(String),
    /// A requested code cannot be built with the given parameters.
    #[error("construction error: {0}")]
    Construction(String),
    /// A numeric check failed (non-integral transform output, overflow).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Domain(_) => 2,
            Error::Construction(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! usage {
    ($($arg:tt)*) => { $crate::error::Error::Usage(format!($($arg)*)) };
}
macro_rules! construction {
    ($($arg:tt)*) => { $crate::error::Error::Construction(format!($($arg)*)) };
}
pub(crate) use construction;
pub(crate) use usage;
