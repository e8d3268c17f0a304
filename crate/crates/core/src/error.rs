use thiserror::Error;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid axis: {0}")]
    Axis(String),

    #[error("grid of {cells} cells exceeds the limit of {limit}")]
    GridTooLarge { cells: u128, limit: u128 },

    #[error("invalid circle map: {0}")]
    InvalidMap(String),

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("ambiguous unwrapping step of {step} rad at sample {index}")]
    StepAmbiguity { index: usize, step: f64 },

    #[error("loop not closed: winding residual {residual}")]
    Residual { residual: f64 },

    #[error("spectral estimate refused: {0}")]
    NonUniformAxis(String),

    #[error("no pair of progressions covers the spectral support {0:?}")]
    NoCover(Vec<i64>),

    #[error("factorization error {max_error:e} exceeds tolerance {tolerance:e}")]
    Tolerance { max_error: f64, tolerance: f64 },

    #[error("ambiguous torus match at pulse {pulse}: best {best:e}, rival {rival:e}")]
    Ambiguity { pulse: usize, best: f64, rival: f64 },

    #[error("lost continuity at pulse {pulse}: residual {residual:e} > {tolerance:e}")]
    Continuity {
        pulse: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("signature does not lie on the reference torus: residual {residual:e} > {tolerance:e}")]
    Mismatch { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    /// True for failures of an estimator to reach an unambiguous answer,
    /// as opposed to bad input.
    pub fn is_estimator_failure(&self) -> bool {
        matches!(
            self,
            Error::StepAmbiguity { .. }
                | Error::Residual { .. }
                | Error::NonUniformAxis(_)
                | Error::NoCover(_)
                | Error::Ambiguity { .. }
                | Error::Continuity { .. }
                | Error::Mismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
