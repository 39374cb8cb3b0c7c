use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("anisotropy A must be positive and finite, got {0}")]
    InvalidAnisotropy(f64),

    #[error("A = {a} is outside the {expected} range required here")]
    RegimeMismatch { a: f64, expected: &'static str },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("series diverges: s = {s} must exceed {min}")]
    Divergent { s: f64, min: f64 },

    #[error("cutoff N = {0} is below the minimum of 4")]
    InvalidCutoff(u32),

    #[error("tolerance {tol:e} needs cutoff N > {cap}; direct summation is infeasible")]
    CutoffCapExceeded { tol: f64, cap: u32 },

    #[error("tail bound {tail_bound:e} is not below {gate} x magnitude {magnitude:e}")]
    GateExceeded {
        tail_bound: f64,
        magnitude: f64,
        gate: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid probes: {0}")]
    InvalidProbes(String),
}

impl Error {
    /// True for failures caused by asking for more accuracy than direct
    /// summation can certify.
    pub fn is_unattainable(&self) -> bool {
        matches!(
            self,
            Error::CutoffCapExceeded { .. } | Error::GateExceeded { .. }
        )
    }
}
