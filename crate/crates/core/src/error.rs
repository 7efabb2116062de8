use thiserror::Error;

/// Errors raised by the geometry, grid and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfkError {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(i64),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unsupported dimension {0}: grid computations are planar only")]
    UnsupportedDimension(usize),

    #[error("resolution {0} too coarse: rasterization is empty")]
    ResolutionTooCoarse(usize),

    #[error("invalid exponent p = {p}: {reason}")]
    InvalidExponent { p: f64, reason: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid condenser: {0}")]
    InvalidCondenser(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("bracketing failed on [{lo}, {hi}]: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },

    #[error("argument {0} outside the domain of the function")]
    OutOfDomain(f64),

    #[error("solver did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, PfkError>;

/// `strict` selects p > 1 (solvers) versus p >= 1 (functionals).
pub(crate) fn check_exponent(p: f64, strict: bool) -> Result<()> {
    let ok = p.is_finite() && if strict { p > 1.0 } else { p >= 1.0 };
    if ok {
        Ok(())
    } else if strict {
        Err(PfkError::InvalidExponent {
            p,
            reason: "p must exceed 1",
        })
    } else {
        Err(PfkError::InvalidExponent {
            p,
            reason: "p must be at least 1",
        })
    }
}
