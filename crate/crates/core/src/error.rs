use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x} lies outside the domain {domain}")]
    Domain { x: f64, domain: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("near-singular determinant {which}: |value| = {value:e} <= tolerance {tolerance:e}")]
    NearSingular { which: String, value: f64, tolerance: f64 },

    #[error("function source error: {0}")]
    Source(String),

    #[error("format error on line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("one-sided limit did not converge after {} halvings (last value {last})", trace.len())]
    LimitDiverged { trace: Vec<(f64, f64)>, last: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("precondition failed: {message}")]
    Precondition { message: String, witness: Option<Vec<f64>> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
