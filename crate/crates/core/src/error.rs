use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum TtoError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pseudocontinuation pole near z = {z}")]
    Pole { z: Complex64 },

    #[error("roots of Q are not distinct (minimum separation {min_separation:e})")]
    DegenerateRoots { min_separation: f64 },

    #[error("root {root} lies within {distance:e} of the unit circle")]
    CircleRoots { root: Complex64, distance: f64 },

    #[error("real-linear map is degenerate (|a| = |c|)")]
    DegenerateMap,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("function is not in the model space (|P+(conj(theta) f)| = {defect:e}, tolerance {tolerance:e})")]
    NotInModelSpace { defect: f64, tolerance: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("contour passes too close to a zero (|F| = {modulus:e} near z = {z})")]
    ContourTooClose { z: Complex64, modulus: f64 },

    #[error("inner function is not a finite Blaschke product")]
    NotFiniteBlaschke,

    #[error("criterion and oracle disagree: unmatched {unmatched:?}, spurious {spurious:?}")]
    Mismatch {
        unmatched: Vec<Complex64>,
        spurious: Vec<Complex64>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl TtoError {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            TtoError::Domain(_)
                | TtoError::DegenerateMap
                | TtoError::Precondition(_)
                | TtoError::NotFiniteBlaschke
                | TtoError::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, TtoError>;
