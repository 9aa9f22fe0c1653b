use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Model or configuration parameters violate their invariants.
    Param(String),
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// An enumeration or table would exceed its cap.
    Size {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    /// The requested feature is not available for this input.
    Unsupported(String),
    /// An identity that must hold exactly did not.
    Consistency(String),
    /// Floating point failure (non-PSD Gram, non-finite values).
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Param(m) => write!(f, "invalid parameters: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Size { what, size, cap } => {
                write!(f, "size cap exceeded for {what}: {size} > {cap}")
            }
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Consistency(m) => write!(f, "consistency check failed: {m}"),
            Error::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_cap(what: &'static str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::Size { what, size, cap })
    } else {
        Ok(())
    }
}
