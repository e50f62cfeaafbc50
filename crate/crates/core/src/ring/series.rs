//! Truncated Laurent series in one distinguished variable.

use std::fmt;
use std::sync::Arc;

use super::field::Field;
use super::poly::LaurentPoly;
use super::vars::VarTable;
use super::RingError;

/// `sum_{n >= low} t^n coeffs[n - low]`, known through order `high`.
///
/// `high == None` means the series is exact (a finite sum). Orders above
/// `high` are unknown. Coefficients never contain the expansion variable.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<F: Field> {
    table: Arc<VarTable>,
    var: usize,
    low: i64,
    high: Option<i64>,
    coeffs: Vec<LaurentPoly<F>>,
}

impl<F: Field> TruncatedSeries<F> {
    /// Splits `p` by powers of `var`, keeping orders up to `high`.
    pub fn from_poly(p: &LaurentPoly<F>, var: usize, high: Option<i64>) -> Self {
        let parts = p.split_by(var);
        let table = p.table().clone();
        let parts: Vec<_> = parts.into_iter().filter(|(k, _)| high.is_none_or(|h| *k <= h)).collect();
        let Some(low) = parts.first().map(|(k, _)| *k) else {
            return Self::zero(&table, var, high);
        };
        let top = parts.last().unwrap().0;
        let mut coeffs = vec![LaurentPoly::zero(&table); (top - low + 1) as usize];
        for (k, c) in parts {
            coeffs[(k - low) as usize] = c;
        }
        Self::build(table, var, low, high, coeffs)
    }

    pub fn from_coeffs(
        table: &Arc<VarTable>,
        var: usize,
        low: i64,
        high: Option<i64>,
        coeffs: Vec<LaurentPoly<F>>,
    ) -> Result<Self, RingError> {
        if coeffs.iter().any(|c| c.contains_var(var)) {
            return Err(RingError::SeriesVariableInCoefficient);
        }
        Ok(Self::build(table.clone(), var, low, high, coeffs))
    }

    pub fn zero(table: &Arc<VarTable>, var: usize, high: Option<i64>) -> Self {
        TruncatedSeries { table: table.clone(), var, low: high.map_or(0, |h| h + 1), high, coeffs: Vec::new() }
    }

    fn build(table: Arc<VarTable>, var: usize, mut low: i64, high: Option<i64>, mut coeffs: Vec<LaurentPoly<F>>) -> Self {
        if let Some(h) = high {
            let keep = (h - low + 1).max(0) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        low += lead as i64;
        if coeffs.is_empty() {
            return Self::zero(&table, var, high);
        }
        TruncatedSeries { table, var, low, high, coeffs }
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn var_name(&self) -> &str {
        self.table.name(self.var)
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    /// Lowest order with a nonzero coefficient, or one past `high` for zero.
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> Option<i64> {
        self.high
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^n`; `None` when `n` lies beyond the known window.
    pub fn coeff(&self, n: i64) -> Option<LaurentPoly<F>> {
        if self.high.is_some_and(|h| n > h) {
            return None;
        }
        if n < self.low || n >= self.low + self.coeffs.len() as i64 {
            return Some(LaurentPoly::zero(&self.table));
        }
        Some(self.coeffs[(n - self.low) as usize].clone())
    }

    /// Nonzero orders with their coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &LaurentPoly<F>)> {
        let low = self.low;
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (low + i as i64, c))
    }

    /// Recombines into a single polynomial in the expansion variable.
    pub fn to_poly(&self) -> LaurentPoly<F> {
        self.iter().fold(LaurentPoly::zero(&self.table), |acc, (n, c)| {
            &acc + &(c * &LaurentPoly::var_pow(&self.table, self.var, n))
        })
    }

    pub fn truncate(&self, high: i64) -> Self {
        let h = self.high.map_or(high, |x| x.min(high));
        Self::build(self.table.clone(), self.var, self.low, Some(h), self.coeffs.clone())
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.var != other.var || self.table != other.table {
            Err(RingError::TableMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let high = min_opt(self.high, other.high);
        let p = &self.to_poly() + &other.to_poly();
        Ok(Self::from_poly(&p, self.var, high))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        TruncatedSeries { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let high = min_opt(self.high.map(|h| h + other.low), other.high.map(|h| h + self.low));
        let p = &self.to_poly() * &other.to_poly();
        Ok(Self::from_poly(&p, self.var, high))
    }

    /// Multiplies every coefficient by a polynomial free of the variable.
    pub fn scale(&self, c: &LaurentPoly<F>) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        Self::build(self.table.clone(), self.var, self.low, self.high, coeffs)
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Long division `a / b`.
///
/// The quotient is valid through
/// `min(a.high - v, b.high + a.low - 2v)` where `v` is the valuation of
/// `b`, further capped by `cap`. When both inputs are exact and no cap is
/// given, the division must terminate with zero remainder.
pub fn series_divide<F: Field>(
    a: &TruncatedSeries<F>,
    b: &TruncatedSeries<F>,
    cap: Option<i64>,
) -> Result<TruncatedSeries<F>, RingError> {
    a.check(b)?;
    if b.is_zero() {
        return Err(RingError::DivisionByZero);
    }
    let v = b.low;
    let lead_inv = b.coeffs[0].unit_inverse().ok_or(RingError::NonUnitLeadingCoefficient)?;
    let table = &a.table;
    if a.is_zero() {
        let high = min_opt(min_opt(a.high.map(|h| h - v), cap), b.high.map(|h| h + a.low - 2 * v));
        return Ok(TruncatedSeries::zero(table, a.var, high));
    }
    let q_low = a.low - v;
    let window = min_opt(
        min_opt(a.high.map(|h| h - v), b.high.map(|h| h + a.low - 2 * v)),
        cap,
    );
    let top = match window {
        Some(h) => h,
        None => a.low + a.coeffs.len() as i64 - 1 - v,
    };
    let mut rem: Vec<LaurentPoly<F>> = a.coeffs.clone();
    let mut q: Vec<LaurentPoly<F>> = Vec::new();
    for n in q_low..=top {
        let idx = (n - q_low) as usize;
        let r = rem.get(idx).cloned().unwrap_or_else(|| LaurentPoly::zero(table));
        let qn = &r * &lead_inv;
        if !qn.is_zero() {
            for (j, bj) in b.coeffs.iter().enumerate() {
                let pos = idx + j;
                if rem.len() <= pos {
                    rem.resize(pos + 1, LaurentPoly::zero(table));
                }
                rem[pos] = &rem[pos] - &(&qn * bj);
            }
        }
        q.push(qn);
    }
    if window.is_none() && rem.iter().any(|c| !c.is_zero()) {
        return Err(RingError::UnboundedQuotient);
    }
    Ok(TruncatedSeries::build(table.clone(), a.var, q_low, window, q))
}

impl<F: Field> fmt::Display for TruncatedSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.var_name();
        let parts: Vec<String> = self.iter().map(|(n, c)| format!("({c})*{name}^{n}")).collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" + "))?;
        }
        if let Some(h) = self.high {
            write!(f, " + O({name}^{})", h + 1)?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for TruncatedSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::{p, table};
    use super::*;

    fn s(src: &str, high: Option<i64>) -> TruncatedSeries<num_rational::BigRational> {
        let t = table();
        TruncatedSeries::from_poly(&p(&t, src), t.lookup("t").unwrap(), high)
    }

    #[test]
    fn geometric_series() {
        let q = series_divide(&s("1", None), &s("1-t", None), Some(2)).unwrap();
        assert_eq!(q, s("1+t+t^2", Some(2)));
    }

    #[test]
    fn self_quotient_is_one() {
        let a = s("c1*t^-1 + 3 + Q*t^2", None);
        assert_eq!(series_divide(&a, &a, None).unwrap(), s("1", None));
    }

    #[test]
    fn laurent_long_division() {
        // (t^-1 + 1) = t^-1 (1 + t), so the quotient is exactly t^-1
        let q = series_divide(&s("t^-1+1", None), &s("1+t", None), Some(1)).unwrap();
        assert_eq!(q, s("t^-1", Some(1)));
        let back = q.mul(&s("1+t", None)).unwrap();
        assert_eq!(back.truncate(1), s("t^-1+1", Some(1)));
    }

    #[test]
    fn window_tracks_truncation() {
        let a = s("1 + c1*t + c2*t^2", Some(2));
        let b = s("c1*t^-1 + 1", Some(3));
        let q = series_divide(&a, &b, None).unwrap();
        // a valid to 2, b valuation -1 valid to 3: min(2+1, 3+0+2) = 3
        assert_eq!(q.high(), Some(3));
        assert_eq!(q.mul(&b).unwrap().truncate(2), a);
    }

    #[test]
    fn non_unit_leading_coefficient() {
        let r = series_divide(&s("1", None), &s("c1+c2 + t", None), Some(2));
        assert_eq!(r, Err(RingError::NonUnitLeadingCoefficient));
    }

    #[test]
    fn unknown_orders_are_not_zero() {
        let a = s("1 + t", Some(1));
        assert!(a.coeff(2).is_none());
        assert!(a.coeff(1).is_some());
    }
}
