//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, validation, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented domain (wrong parity, wrong sign,
    /// out-of-range, inconsistent dimensions, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function was evaluated outside its mathematical domain
    /// (e.g. the multiplier `MN` below the floor `c0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Too few data points to pin down the polynomial tail.
    #[error("insufficient points for polynomial unisolvency: need at least {required}, got {actual}")]
    InsufficientPoints { required: usize, actual: usize },

    /// The saddle system could not be solved: a pivot fell below the floor
    /// `1e-13 * scale`, which indicates a degenerate point configuration or an
    /// intractably ill-conditioned kernel matrix.
    #[error("degenerate point set or ill-conditioned system ({stage}: {detail})")]
    Degenerate { stage: &'static str, detail: String },

    /// The solved system failed its residual acceptance check.
    #[error("numerical failure ({stage}): {detail}")]
    Numerical { stage: &'static str, detail: String },

    /// Malformed input document (JSON parse or schema mismatch).
    #[error("input format error: {0}")]
    Format(String),
}

impl Error {
    /// Whether this error is an input/validation problem (as opposed to a
    /// numerical failure discovered mid-computation). CLI drivers map the
    /// former to exit code 2 and the latter to exit code 3.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::InsufficientPoints { .. }
                | Error::Format(_)
        )
    }
}
