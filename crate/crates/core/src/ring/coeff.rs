use std::fmt;

use super::field::Field;
use super::poly::LaurentPoly;
use super::ratfunc::RationalFunction;
use super::RingError;

/// Commutative ring of module coefficients.
///
/// `invert` returns an inverse only for ring units; `exact_div` succeeds
/// exactly when the quotient exists in the ring.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Scalar: Field;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Self::Scalar) -> Self;
    fn invert(&self) -> Option<Self>;
    fn exact_div(&self, d: &Self) -> Result<Self, RingError>;

    fn scale_int(&self, n: i64) -> Self {
        self.scale(&Self::Scalar::from_int(n))
    }
}

impl<F: Field> Coefficient for LaurentPoly<F> {
    type Scalar = F;

    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.table())
    }
    fn one_like(&self) -> Self {
        LaurentPoly::one(self.table())
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &F) -> Self {
        LaurentPoly::scale(self, c)
    }
    fn invert(&self) -> Option<Self> {
        self.unit_inverse()
    }
    fn exact_div(&self, d: &Self) -> Result<Self, RingError> {
        LaurentPoly::exact_div(self, d)
    }
}

impl<F: Field> Coefficient for RationalFunction<F> {
    type Scalar = F;

    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.table())
    }
    fn one_like(&self) -> Self {
        RationalFunction::one(self.table())
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalFunction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RationalFunction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFunction::mul(self, o)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn scale(&self, c: &F) -> Self {
        RationalFunction::scale(self, c)
    }
    fn invert(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn exact_div(&self, d: &Self) -> Result<Self, RingError> {
        self.div(d)
    }
}
