//! Scalar fields that polynomial coefficients may live in.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// A coefficient field for [`LaurentPoly`](super::LaurentPoly).
///
/// Exact fields are the intended use; every identity checked by this crate
/// compares coefficients for equality.
pub trait Field:
    Clone + PartialEq + Debug + Display + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// `true` when the value is strictly negative.
    fn is_negative_value(&self) -> bool;
}

impl Field for BigRational {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_negative_value(&self) -> bool {
        self.is_negative()
    }
}

impl Field for Ratio<i64> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn is_negative_value(&self) -> bool {
        self.is_negative()
    }
}

impl Field for Ratio<i128> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn is_negative_value(&self) -> bool {
        self.is_negative()
    }
}

/// Integer power of a field element; negative exponents invert.
pub fn field_pow<F: Field>(base: &F, exp: i64) -> F {
    let mut acc = F::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc * base.clone();
    }
    if exp < 0 {
        F::one() / acc
    } else {
        acc
    }
}
