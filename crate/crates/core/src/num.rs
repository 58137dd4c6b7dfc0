//! Scalar abstraction shared by the probability, ensemble and tuning code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type used for character probabilities, ensemble weights
/// and optimizer search points. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + Ratio
    + 'static
{
    /// Lossy conversion from `f64`; every implementor can represent the
    /// rounded value so this never fails.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar is convertible to f64")
    }

    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }

    /// Probability values must lie in `[0, 1]`.
    fn is_probability(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numeric type for precision/recall/F1 values. Besides the floats this is
/// implemented for exact rationals so metrics can be checked without rounding.
pub trait Ratio: num_traits::Num + Copy + PartialOrd + Debug {
    fn of_counts(num: usize, den: usize) -> Self;
    fn approx(self) -> f64;
}

impl Ratio for f64 {
    fn of_counts(num: usize, den: usize) -> Self {
        num as f64 / den as f64
    }

    fn approx(self) -> f64 {
        self
    }
}

impl Ratio for f32 {
    fn of_counts(num: usize, den: usize) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn approx(self) -> f64 {
        self as f64
    }
}

impl Ratio for num_rational::Ratio<u64> {
    fn of_counts(num: usize, den: usize) -> Self {
        num_rational::Ratio::new(num as u64, den as u64)
    }

    fn approx(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
