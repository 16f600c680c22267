use thiserror::Error;

/// Failure classes. The CLI maps each one onto a stable exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke a precondition (bad mask, vector outside the polytope, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// Malformed instance or certificate input.
    #[error("parse error: {0}")]
    Parse(String),
    /// Something that the underlying theorems rule out happened anyway.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    /// An exhaustive search or scan would exceed its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
