//! Real scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the crate can run on (`f32` or `f64`).
///
/// Tolerances are expressed per precision: the `f64` values are the ones the
/// library is calibrated against, the `f32` values are scaled to its epsilon.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Relative tolerance for Hermiticity checks, scaled by `‖H‖_max`.
    const HERMITIAN_TOL: f64;
    /// Relative floor for adjacent-level gaps, scaled by `‖H‖_max`.
    const GAP_FLOOR: f64;
    /// Absolute floor below which a criteria denominator counts as degenerate.
    const DEGENERATE_DENOMINATOR: f64;
    /// Maximum number of cyclic Jacobi sweeps before giving up.
    const MAX_JACOBI_SWEEPS: usize = 64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-12;
    const GAP_FLOOR: f64 = 1e-10;
    const DEGENERATE_DENOMINATOR: f64 = 1e-14;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const GAP_FLOOR: f64 = 1e-5;
    const DEGENERATE_DENOMINATOR: f64 = 1e-6;
}
