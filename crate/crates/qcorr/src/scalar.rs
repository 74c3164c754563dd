//! Floating-point abstraction the rest of the crate is generic over.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};

/// Scalar type for all numerics: `f32`, `f64`, or anything else with the
/// same num-traits surface.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Product
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into the scalar type. Used for constants and
    /// tolerances throughout; panics only if the type cannot represent any
    /// approximation of the value, which none of the float types hit.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    /// Lossy view as `f64`, for error messages and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Product
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}
