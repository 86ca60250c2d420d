use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures of the numerical pipeline.
///
/// Magnitudes are carried as `f64` regardless of the working precision so the
/// error type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigenvalue gap {gap:e} at t = {time} is below the floor {floor:e} (level crossings are unsupported)")]
    EigenGapTooSmall { time: f64, gap: f64, floor: f64 },

    #[error("frames and connection were built on different time grids")]
    GridMismatch,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Numerical failures as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::EigenGapTooSmall { .. }
                | Error::NoConvergence { .. }
                | Error::NonFinite(_)
        )
    }
}
