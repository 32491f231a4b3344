use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid integral index: {0}")]
    InvalidIndex(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("calibration failed: residual {residual:e} exceeds {threshold:e}")]
    Calibration { residual: f64, threshold: f64 },

    #[error("insufficient calibration samples: need at least {need}, got {got}")]
    CalibrationSamples { need: usize, got: usize },

    #[error("invalid perturbation spec: {0}")]
    Spec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("possibly identically zero: max |M| = {max_abs:e} over the scan")]
    PossiblyZero { max_abs: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
