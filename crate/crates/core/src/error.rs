use std::io;

use thiserror::Error;

/// Errors raised by the numeric layers and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold (for example `K >= q/l`).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The request would exceed a configured memory or size cap.
    #[error("resource limit exceeded: {what} = {requested} > cap {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    /// A combinatorial enumeration ran past its budget. `partial` carries
    /// whatever was accumulated before stopping.
    #[error("budget exhausted: {what} exceeded {budget}")]
    Budget {
        what: &'static str,
        budget: u64,
        partial: Option<f64>,
    },

    #[error("invalid input: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn resource(what: &'static str, requested: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::Resource {
            what,
            requested: requested.into(),
            cap: cap.into(),
        }
    }
}
