use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps [`Error::Budget`] to exit code 2 and every other variant
/// except [`Error::Verification`] to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("element is not a unit modulo {modulus}")]
    NonUnit { modulus: String },

    #[error("{what} = {value} is out of range ({bound})")]
    OutOfRange {
        what: &'static str,
        value: String,
        bound: String,
    },

    #[error("element {0} is not in canonical form for this group")]
    InvalidElement(String),

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: String,
        needed: u64,
        limit: u64,
    },

    #[error("eigensolver did not converge after {iterations} steps (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("estimation is degenerate: {0}")]
    Estimation(String),

    #[error("invalid horizon: window [{lo}, {hi}] is empty")]
    InvalidHorizon { lo: i64, hi: i64 },

    #[error("filtration is not nested between components {k} and {next}: {detail}")]
    NestednessViolation { k: usize, next: usize, detail: String },

    #[error("census does not cover indices {from}..={to}")]
    Coverage { from: u64, to: u64 },

    #[error("budget exceeded after completing indices 1..={completed}: {detail}")]
    PartialResult { completed: u64, detail: String },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
