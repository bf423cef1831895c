//! Scalar traits for the generic kernels.
//!
//! Everything in this crate is exact. [`Scalar`] covers rings of coefficients
//! (integers and rationals of any width); [`ExactField`] is implemented only
//! for `num_rational::Ratio<_>`, so floating-point types cannot reach the
//! elimination and definiteness routines.

use std::fmt::Debug;

use num_integer::Integer as IntegerOps;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar: Clone + Debug + PartialEq + Num + Signed + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Num + Signed + FromPrimitive {}

/// An exact ordered field.
pub trait ExactField: Scalar + PartialOrd {}

impl<T> ExactField for Ratio<T>
where
    T: Clone + Debug + IntegerOps + Signed,
    Ratio<T>: Scalar,
{
}

/// Converts an `i64` structure constant into the coefficient type.
pub(crate) fn lift<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("coefficient type cannot represent i64 constant")
}
