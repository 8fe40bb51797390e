use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands or arguments that violate an API precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A point or parameter outside the problem's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Non-finite coefficients appeared during the iteration.
    #[error("overflow at iteration {n}")]
    Overflow { n: usize },

    /// |λₙ(x)| too small to form the ratio sₙ/λₙ.
    #[error("λ vanishes at x = {x} (|λ| = {value:e}); move the evaluation point")]
    DivisionDegeneracy { x: f64, value: f64 },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// A non-finite sample met while integrating.
    #[error("non-finite value at grid point {index} (x = {x})")]
    NonFinite { index: usize, x: f64 },

    #[error("{0}")]
    NoSignChange(String),

    #[error("series did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
