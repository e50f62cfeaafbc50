//! Exact construction and verification of irregular vectors of the
//! Virasoro algebra.

pub mod frames;
pub mod gauge;
pub mod gram;
pub mod ring;
pub mod solver;
pub mod symbols;
pub mod virasoro;

use num_rational::BigRational;

pub type Rational = BigRational;
pub type Poly = ring::LaurentPoly<Rational>;
pub type RatFunc = ring::RationalFunction<Rational>;
pub type Series = ring::TruncatedSeries<Rational>;
