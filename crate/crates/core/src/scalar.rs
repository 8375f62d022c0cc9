//! Floating point scalar abstraction.
//!
//! Everything in this crate is generic over [`Scalar`], implemented for `f32`
//! and `f64`. Exact rational scalars are not supported: generators are
//! normalized to unit length, which leaves the rationals immediately.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point type usable by the geometry and series code.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Global zero test used for sign decisions (`ε_0`).
    fn zero_tol() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1e3))
    }

    /// Threshold on `|det V|` below which generators count as dependent.
    fn rank_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(1e3))
    }

    /// Largest tolerated asymmetry for inputs that must be symmetric.
    fn symmetry_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(1e3))
    }

    /// Norm below which a vector is treated as zero.
    fn tiny_norm() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(10.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_track_precision() {
        assert_eq!(<f64 as Scalar>::zero_tol(), 1e-10);
        assert!(<f32 as Scalar>::zero_tol() > 1e-5);
        assert_eq!(<f64 as Scalar>::lit(0.5), 0.5);
    }
}
