//! Scalar abstraction: the whole crate is generic over any real type
//! provided by `num_traits` (in practice `f32` or `f64`).

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar with the transcendentals the solvers need.
pub trait Scalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

/// Convert an `f64` literal into the working scalar type.
#[inline]
pub fn lit<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Convert back to `f64` for error payloads and reporting.
#[inline]
pub fn to_f64<F: Scalar>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Convert a `usize` (grid sizes, indices) into the scalar type.
#[inline]
pub fn from_usize<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("usize must convert into the scalar type")
}
