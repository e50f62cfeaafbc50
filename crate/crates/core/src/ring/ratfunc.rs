//! Quotients of Laurent polynomials.
//!
//! No polynomial gcd is computed. Normalization cancels exact divisibility,
//! monomial content and the leading coefficient of the denominator, which
//! keeps the representation small for the level-by-level solves it is used
//! for. Equality is decided by cross multiplication.

use std::fmt;
use std::sync::Arc;

use super::field::Field;
use super::poly::LaurentPoly;
use super::vars::VarTable;
use super::RingError;

#[derive(Clone)]
pub struct RationalFunction<F: Field> {
    num: LaurentPoly<F>,
    den: LaurentPoly<F>,
}

impl<F: Field> RationalFunction<F> {
    pub fn new(num: LaurentPoly<F>, den: LaurentPoly<F>) -> Result<Self, RingError> {
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if num.table() != den.table() {
            return Err(RingError::TableMismatch);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: LaurentPoly<F>) -> Self {
        let den = LaurentPoly::one(p.table());
        RationalFunction { num: p, den }
    }

    pub fn zero(table: &Arc<VarTable>) -> Self {
        Self::from_poly(LaurentPoly::zero(table))
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::from_poly(LaurentPoly::one(table))
    }

    fn normalized(num: LaurentPoly<F>, den: LaurentPoly<F>) -> Self {
        if num.is_zero() {
            return Self::from_poly(num);
        }
        if let Some(inv) = den.unit_inverse() {
            return Self::from_poly(&num * &inv);
        }
        if let Ok(q) = num.exact_div(&den) {
            return Self::from_poly(q);
        }
        // shift the denominator to an ordinary polynomial with no monomial
        // factor, then make its leading coefficient one
        let shift: smallvec::SmallVec<[i16; 16]> = den.min_exponents().iter().map(|&x| -x).collect();
        let lead = den.leading().map(|(_, c)| c.clone()).unwrap_or_else(F::one);
        let factor = F::one() / lead;
        let num = num.mul_term(&factor, &shift);
        let den = den.mul_term(&factor, &shift);
        RationalFunction { num, den }
    }

    pub fn numerator(&self) -> &LaurentPoly<F> {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly<F> {
        &self.den
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.num.table()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this reduces to, when the denominator is one.
    pub fn as_poly(&self) -> Option<&LaurentPoly<F>> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::normalized(&self.num + &other.num, self.den.clone());
        }
        if let Ok(q) = other.den.exact_div(&self.den) {
            return Self::normalized(&(&self.num * &q) + &other.num, other.den.clone());
        }
        if let Ok(q) = self.den.exact_div(&other.den) {
            return Self::normalized(&self.num + &(&other.num * &q), self.den.clone());
        }
        Self::normalized(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.table());
        }
        let (mut a, mut b) = (self.num.clone(), self.den.clone());
        let (mut c, mut d) = (other.num.clone(), other.den.clone());
        if let Ok(q) = a.exact_div(&d) {
            a = q;
            d = LaurentPoly::one(self.table());
        }
        if let Ok(q) = c.exact_div(&b) {
            c = q;
            b = LaurentPoly::one(self.table());
        }
        Self::normalized(&a * &c, &b * &d)
    }

    pub fn mul_poly(&self, p: &LaurentPoly<F>) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    pub fn scale(&self, c: &F) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inverse(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, RingError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn derivative(&self, var: usize) -> Self {
        let top = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        Self::normalized(top, &self.den * &self.den)
    }
}

impl<F: Field> PartialEq for RationalFunction<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl<F: Field> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::{p, table};
    use super::*;

    #[test]
    fn arithmetic_and_equality() {
        let t = table();
        let a = RationalFunction::new(p(&t, "1"), p(&t, "x+1")).unwrap();
        let b = RationalFunction::new(p(&t, "x"), p(&t, "x+1")).unwrap();
        assert_eq!(a.add(&b), RationalFunction::one(&t));
        let c = RationalFunction::new(p(&t, "2*x+2"), p(&t, "4")).unwrap();
        assert_eq!(c.as_poly(), Some(&p(&t, "x/2 + 1/2")));
        let d = a.mul(&RationalFunction::from_poly(p(&t, "x+1")));
        assert_eq!(d.as_poly(), Some(&p(&t, "1")));
        assert_eq!(a.inverse().unwrap().as_poly(), Some(&p(&t, "x+1")));
        let e = RationalFunction::new(p(&t, "y"), p(&t, "2*x*y + 2*x")).unwrap();
        let f = RationalFunction::new(p(&t, "3*y"), p(&t, "6*x*(y+1)")).unwrap();
        assert_eq!(e, f);
    }
}
