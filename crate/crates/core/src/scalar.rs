//! Scalar abstraction so the numeric pipeline can run in `f32` or `f64`.
//!
//! Model training uses `f64` (finite-difference gradient checks need the
//! headroom); inference is fine in `f32`. Everything downstream of raw frame
//! metadata is generic over [`Scalar`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign};

/// Floating-point scalar used by features, classifiers and calibration.
pub trait Scalar:
    Float + NumAssign + Sum + Copy + Debug + Display + Send + Sync + 'static
{
    const ZERO: Self;
    const ONE: Self;

    /// Convert a configuration-level `f64` into the working precision.
    fn from_f64(v: f64) -> Self;

    /// Convert back to `f64` for reporting and serialization.
    fn to_f64(self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

impl Scalar for f32 {
    const ZERO: f32 = 0.0;
    const ONE: f32 = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const ZERO: f64 = 0.0;
    const ONE: f64 = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}
