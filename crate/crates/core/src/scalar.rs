//! Scalar abstraction shared by the state engines.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar the Gaussian and Fock engines are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are expressed through
/// [`Real::structural_tol`] and [`Real::physics_tol`] so that single precision
/// gets bounds it can actually meet.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance for structural checks (symmetry, symplecticity).
    fn structural_tol() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1e4))
    }

    /// Absolute tolerance for physical inequalities (uncertainty relation).
    fn physics_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(1e4))
    }
}

impl Real for f32 {}
impl Real for f64 {}
