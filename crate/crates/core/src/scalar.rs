//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances given as `f64` are clamped
/// from below by a small multiple of the type's machine epsilon, so `f32`
/// runs terminate but are correspondingly less accurate.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// `max(0, x)`.
#[inline]
pub fn pos<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

/// Tolerance usable in `T`: never smaller than `64 * epsilon`.
#[inline]
pub fn usable_tol<T: Scalar>(tol: f64) -> T {
    let t: T = lit(tol);
    t.max(T::epsilon() * lit(64.0))
}
