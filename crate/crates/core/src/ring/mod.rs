//! Exact arithmetic: rationals, Laurent polynomials, rational functions,
//! truncated series and linear algebra over them.

mod coeff;
mod field;
pub mod linalg;
mod parse;
mod poly;
mod ratfunc;
mod series;
mod vars;

pub use coeff::Coefficient;
pub use field::{field_pow, Field};
pub use poly::{grlex_cmp, Exponents, LaurentPoly, WeightedDegree};
pub use parse::ParseError;
pub use ratfunc::RationalFunction;
pub use series::{series_divide, TruncatedSeries};
pub use vars::VarTable;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands live over different variable tables")]
    TableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has a negative weight")]
    NegativeWeight(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no exact quotient exists in the Laurent ring")]
    NotDivisible,
    #[error("leading coefficient of the divisor is not a unit")]
    NonUnitLeadingCoefficient,
    #[error("exact series quotient does not terminate; give an order cap")]
    UnboundedQuotient,
    #[error("series coefficient contains the expansion variable")]
    SeriesVariableInCoefficient,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use num_rational::BigRational;
    use std::sync::Arc;

    pub type P = LaurentPoly<BigRational>;

    pub fn table() -> Arc<VarTable> {
        VarTable::new([("Q", 0), ("c0p", 0), ("c0", 0), ("c1", 1), ("c2", 2), ("c3", 3), ("x", 0), ("y", 0), ("t", 1)])
            .unwrap()
    }

    pub fn p(t: &Arc<VarTable>, s: &str) -> P {
        P::parse(t, s).unwrap()
    }
}
