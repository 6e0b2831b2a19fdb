use thiserror::Error;

/// Errors reported by the workbench.
///
/// Internal-consistency failures (an oracle disagreeing with the series
/// engine, a non-exact division in a counting recurrence) are reported through
/// [`Error::Consistency`] so that front ends can map them to a dedicated exit
/// status.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} = {requested} exceeds the configured cap {cap}")]
    ResourceCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("numeric non-convergence: {0}")]
    NonConvergence(String),

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("undefined probability: {0}")]
    UndefinedProbability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
