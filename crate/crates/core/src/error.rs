use thiserror::Error;

/// Errors raised by the library. The variants map onto the failure classes
/// the CLI distinguishes (usage/domain vs. budget exhaustion).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Parameters outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An index or rank outside the valid range.
    #[error("range error: {0}")]
    Range(String),
    /// The instance is too large for the configured search or solve budget.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}
macro_rules! resource {
    ($($arg:tt)*) => { $crate::error::Error::Resource(format!($($arg)*)) };
}
pub(crate) use {contract, domain, resource};
