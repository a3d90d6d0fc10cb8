//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by library operations.
///
/// The command-line front end maps [`Error::Usage`] to exit code 2 and every
/// other variant to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A prime `p` with `|I_p| = p` was reached; sifting past it is refused.
    #[error("degenerate prime {0}: every residue class is sieved")]
    Degenerate(u64),

    /// A value exceeded the fixed-width integer range used for it.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Malformed input text (polynomials, system files, shift files).
    #[error("parse error: {0}")]
    Parse(String),

    /// A request that is well-formed but too large for exact enumeration.
    #[error("too large: {0}")]
    TooLarge(String),

    /// The clean-up stage ran out of primes to match survivors.
    #[error("clean-up failed: {survivors} survivors, {available} primes available")]
    CleanupFailed { survivors: usize, available: usize },

    /// Invalid invocation of the command-line tool.
    #[error("usage error: {0}")]
    Usage(String),

    /// Filesystem failure, carried as text so the type stays `Clone`.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Shorthand result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Build an [`Error::Domain`] from a format string.
macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain;
