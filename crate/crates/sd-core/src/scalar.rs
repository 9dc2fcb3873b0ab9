//! Coefficient abstraction. All engines are written against [`Scalar`], a
//! field-flavored bundle of `num-traits` bounds satisfied by `f32`/`f64` and
//! by `num_rational::BigRational` (the exact default).

use num_traits::{FromPrimitive, One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + FromPrimitive
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("scalar admits integer embedding")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + FromPrimitive
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_floats_embed() {
        let r = num_rational::BigRational::from_ratio(3, -6);
        assert_eq!(r, num_rational::BigRational::from_ratio(-1, 2));
        let f = f64::from_ratio(1, 4);
        assert_eq!(f, 0.25);
    }
}
