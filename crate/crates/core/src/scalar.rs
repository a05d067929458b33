//! Scalar abstraction: the whole library is generic over the floating type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating scalar the geometry kernels run on (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for importing an `f64` literal into the working scalar type.
#[inline]
pub fn fl<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// `x/2` without round-tripping through a literal.
#[inline]
pub(crate) fn half<T: Scalar>(x: T) -> T {
    x / fl::<T>(2.0)
}

#[inline]
pub(crate) fn two<T: Scalar>() -> T {
    fl(2.0)
}
