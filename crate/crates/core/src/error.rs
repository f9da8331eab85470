use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside an operation's domain (zero modulus, empty list, bad exponent string, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A brute-force enumeration would exceed the configured cap.
    #[error("resource error: {what} needs {size} enumeration steps, above the cap of {cap}")]
    Resource { what: &'static str, size: String, cap: u64 },

    /// Analytic evaluation requested outside its convergence region.
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
