use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar floating-point type the numeric kernels are generic over.
///
/// Everything in `statkit` (special functions, laws, solvers, quadrature) works for any
/// `Real`; the inference layers above instantiate `f64` (see the aliases in the crate
/// root). `f32` trades the stated accuracy contracts for speed and is mainly useful for
/// plotting-density work.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used to inject literal coefficients.
    fn of(x: f64) -> Self;

    /// Widening (or identity) conversion to `f64` for reporting.
    fn as_f64(self) -> f64;

    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    fn half() -> Self {
        Self::of(0.5)
    }

    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
