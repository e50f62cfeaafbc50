//! Sparse multivariate Laurent polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use super::field::{field_pow, Field};
use super::vars::{same_table, VarTable};
use super::RingError;

/// Exponent vector indexed by the variable table order.
pub type Exponents = SmallVec<[i16; 16]>;

/// Graded lexicographic comparison: total degree first, then the
/// exponent of the earliest variable.
pub fn grlex_cmp(a: &[i16], b: &[i16]) -> Ordering {
    let da: i64 = a.iter().map(|&e| e as i64).sum();
    let db: i64 = b.iter().map(|&e| e as i64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, PartialEq, Eq)]
struct GrlexKey(Exponents);

impl Ord for GrlexKey {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for GrlexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of [`LaurentPoly::weighted_degree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightedDegree {
    Zero,
    Homogeneous(i64),
    Mixed(BTreeSet<i64>),
}

/// Laurent polynomial with coefficients in `F`.
///
/// Terms are stored sorted in descending graded lexicographic order with
/// no zero coefficients, so structural equality is mathematical equality.
#[derive(Clone)]
pub struct LaurentPoly<F: Field> {
    table: Arc<VarTable>,
    terms: Vec<(Exponents, F)>,
}

impl<F: Field> PartialEq for LaurentPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_table(&self.table, &other.table)
    }
}

impl<F: Field> Eq for LaurentPoly<F> {}

impl<F: Field> std::hash::Hash for LaurentPoly<F>
where
    F: std::hash::Hash,
{
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl<F: Field> LaurentPoly<F> {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        LaurentPoly { table: table.clone(), terms: Vec::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::constant(table, F::one())
    }

    pub fn constant(table: &Arc<VarTable>, c: F) -> Self {
        Self::monomial(table, c, zero_exps(table.len()))
    }

    pub fn from_int(table: &Arc<VarTable>, n: i64) -> Self {
        Self::constant(table, F::from_int(n))
    }

    pub fn from_ratio(table: &Arc<VarTable>, num: i64, den: i64) -> Self {
        Self::constant(table, F::from_ratio(num, den))
    }

    pub fn monomial(table: &Arc<VarTable>, c: F, exps: Exponents) -> Self {
        assert_eq!(exps.len(), table.len(), "exponent vector length");
        let terms = if c.is_zero() { Vec::new() } else { vec![(exps, c)] };
        LaurentPoly { table: table.clone(), terms }
    }

    /// The variable at index `i` to the power `e`.
    pub fn var_pow(table: &Arc<VarTable>, i: usize, e: i64) -> Self {
        let mut exps = zero_exps(table.len());
        exps[i] = to_exp(e);
        Self::monomial(table, F::one(), exps)
    }

    pub fn var(table: &Arc<VarTable>, name: &str) -> Result<Self, RingError> {
        Ok(Self::var_pow(table, table.require(name)?, 1))
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(table: &Arc<VarTable>, terms: impl IntoIterator<Item = (Exponents, F)>) -> Self {
        let mut acc: HashMap<Exponents, F> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), table.len(), "exponent vector length");
            accumulate(&mut acc, e, c);
        }
        Self::from_map(table, acc)
    }

    fn from_map(table: &Arc<VarTable>, acc: HashMap<Exponents, F>) -> Self {
        let mut terms: Vec<(Exponents, F)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| grlex_cmp(&b.0, &a.0));
        LaurentPoly { table: table.clone(), terms }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn terms(&self) -> &[(Exponents, F)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value when the polynomial is a constant (including zero).
    pub fn constant_value(&self) -> Option<F> {
        match self.terms.as_slice() {
            [] => Some(F::zero()),
            [(e, c)] if e.iter().all(|&x| x == 0) => Some(c.clone()),
            _ => None,
        }
    }

    fn check_table(&self, other: &Self) -> Result<(), RingError> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(RingError::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_table(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_table(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_table(other)?;
        Ok(self.product(other))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |c: &F| if negate { -c.clone() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match grlex_cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), rhs(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { a[i].1.clone() - b[j].1.clone() } else { a[i].1.clone() + b[j].1.clone() };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (e.clone(), rhs(c))));
        LaurentPoly { table: self.table.clone(), terms: out }
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.table);
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.mul_term(c, e);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.mul_term(c, e);
        }
        let mut acc: HashMap<Exponents, F> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                accumulate(&mut acc, add_exps(ea, eb), ca.clone() * cb.clone());
            }
        }
        Self::from_map(&self.table, acc)
    }

    /// Multiplies by the single term `c * x^e`; order is preserved.
    pub fn mul_term(&self, c: &F, e: &[i16]) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        let terms = self
            .terms
            .iter()
            .map(|(ea, ca)| (add_exps(ea, e), ca.clone() * c.clone()))
            .collect();
        LaurentPoly { table: self.table.clone(), terms }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        let terms = self.terms.iter().map(|(e, a)| (e.clone(), a.clone() * c.clone())).collect();
        LaurentPoly { table: self.table.clone(), terms }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&F::from_int(n))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..n {
            acc = acc.product(self);
        }
        acc
    }

    /// `Some((c, e))` when the polynomial is a single term `c * x^e`.
    pub fn as_unit(&self) -> Option<(&F, &Exponents)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((c, e)),
            _ => None,
        }
    }

    /// Inverse of a unit; `None` for anything with more than one term.
    pub fn unit_inverse(&self) -> Option<Self> {
        let (c, e) = self.as_unit()?;
        let neg: Exponents = e.iter().map(|&x| -x).collect();
        Some(Self::monomial(&self.table, F::one() / c.clone(), neg))
    }

    /// Exact quotient in the Laurent ring.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, RingError> {
        self.check_table(divisor)?;
        if divisor.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if let Some(inv) = divisor.unit_inverse() {
            return Ok(self.product(&inv));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let n = self.table.len();
        let a_min = self.min_exponents();
        let b_min = divisor.min_exponents();
        let a_shift: Exponents = a_min.iter().map(|&x| -x).collect();
        let b_shift: Exponents = b_min.iter().map(|&x| -x).collect();
        let lead_b_exp = add_exps(&divisor.terms[0].0, &b_shift);
        let lead_b_coef = divisor.terms[0].1.clone();
        let b_rest: Vec<(Exponents, F)> = divisor.terms[1..]
            .iter()
            .map(|(e, c)| (add_exps(e, &b_shift), c.clone()))
            .collect();

        let mut rem: BTreeMap<GrlexKey, F> = self
            .terms
            .iter()
            .map(|(e, c)| (GrlexKey(add_exps(e, &a_shift)), c.clone()))
            .collect();
        let mut quotient: Vec<(Exponents, F)> = Vec::new();
        while let Some((GrlexKey(e), c)) = rem.pop_last() {
            let mut qe = Exponents::with_capacity(n);
            for k in 0..n {
                let d = e[k] - lead_b_exp[k];
                if d < 0 {
                    return Err(RingError::NotDivisible);
                }
                qe.push(d);
            }
            let qc = c / lead_b_coef.clone();
            for (be, bc) in &b_rest {
                let key = GrlexKey(add_exps(&qe, be));
                let delta = qc.clone() * bc.clone();
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v = v.clone() - delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quotient.push((qe, qc));
        }
        // q'' = q * x^(b_min - a_min), so q = q'' * x^(a_min - b_min)
        let back: Exponents = (0..n).map(|k| a_min[k] - b_min[k]).collect();
        Ok(Self::from_terms(
            &self.table,
            quotient.into_iter().map(|(e, c)| (add_exps(&e, &back), c)),
        ))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Exponents {
        let n = self.table.len();
        let mut m = zero_exps(n);
        for (idx, (e, _)) in self.terms.iter().enumerate() {
            for k in 0..n {
                if idx == 0 || e[k] < m[k] {
                    m[k] = e[k];
                }
            }
        }
        m
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[var] != 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] -= 1;
            (e2, c.clone() * F::from_int(e[var] as i64))
        });
        Self::from_terms(&self.table, terms)
    }

    pub fn derivative_by(&self, name: &str) -> Result<Self, RingError> {
        Ok(self.derivative(self.table.require(name)?))
    }

    /// Coefficient of `var^k`, free of `var`.
    pub fn coeff(&self, var: usize, k: i64) -> Self {
        let k = to_exp(k);
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == k)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] = 0;
                (e2, c.clone())
            })
            .collect();
        // removing one coordinate can reorder terms
        Self::from_terms(&self.table, terms)
    }

    pub fn coeff_by(&self, name: &str, k: i64) -> Result<Self, RingError> {
        Ok(self.coeff(self.table.require(name)?, k))
    }

    /// Smallest and largest exponent of `var`, or `None` for zero.
    pub fn degree_range(&self, var: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.iter().map(|(e, _)| e[var] as i64);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[var] != 0)
    }

    pub fn weighted_degree(&self) -> WeightedDegree {
        let weights = self.table.weights();
        let set: BTreeSet<i64> = self
            .terms
            .iter()
            .map(|(e, _)| e.iter().zip(weights).map(|(&x, &w)| x as i64 * w).sum())
            .collect();
        match set.len() {
            0 => WeightedDegree::Zero,
            1 => WeightedDegree::Homogeneous(*set.iter().next().unwrap()),
            _ => WeightedDegree::Mixed(set),
        }
    }

    /// `true` when every term has weighted degree `w` (zero counts).
    pub fn is_homogeneous_of(&self, w: i64) -> bool {
        matches!(self.weighted_degree(), WeightedDegree::Zero)
            || self.weighted_degree() == WeightedDegree::Homogeneous(w)
    }

    /// Replaces `var` by `value`. Negative powers require a unit value.
    pub fn substitute(&self, var: usize, value: &Self) -> Result<Self, RingError> {
        self.check_table(value)?;
        if !self.contains_var(var) {
            return Ok(self.clone());
        }
        let inverse = value.unit_inverse();
        let mut pos_powers: Vec<Self> = vec![Self::one(&self.table)];
        let mut neg_powers: Vec<Self> = vec![Self::one(&self.table)];
        let mut acc = Self::zero(&self.table);
        let mut by_power: BTreeMap<i16, Vec<(Exponents, F)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            by_power.entry(k).or_default().push((e2, c.clone()));
        }
        for (k, terms) in by_power {
            let rest = Self::from_terms(&self.table, terms);
            let p = if k >= 0 {
                while pos_powers.len() <= k as usize {
                    let next = pos_powers.last().unwrap().product(value);
                    pos_powers.push(next);
                }
                &pos_powers[k as usize]
            } else {
                let inv = inverse.as_ref().ok_or(RingError::NotDivisible)?;
                let k = (-k) as usize;
                while neg_powers.len() <= k {
                    let next = neg_powers.last().unwrap().product(inv);
                    neg_powers.push(next);
                }
                &neg_powers[k]
            };
            acc = acc.merge(&rest.product(p), false);
        }
        Ok(acc)
    }

    /// Evaluates every variable at a field value; negative powers invert.
    pub fn evaluate(&self, values: &[F]) -> F {
        self.terms.iter().fold(F::zero(), |acc, (e, c)| {
            let m = e
                .iter()
                .zip(values)
                .fold(c.clone(), |m, (&x, v)| m * field_pow(v, x as i64));
            acc + m
        })
    }

    /// Moves the polynomial to another table by variable name.
    pub fn relabel(&self, target: &Arc<VarTable>) -> Result<Self, RingError> {
        let map: Vec<usize> = (0..self.table.len())
            .map(|i| target.require(self.table.name(i)))
            .collect::<Result<_, _>>()?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e2 = zero_exps(target.len());
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    e2[map[i]] = x;
                }
            }
            (e2, c.clone())
        });
        Ok(Self::from_terms(target, terms))
    }

    /// Iterates over the distinct content-free parts grouped by the powers
    /// of `var`: `(k, coefficient of var^k)`, ascending in `k`.
    pub fn split_by(&self, var: usize) -> Vec<(i64, Self)> {
        let mut groups: BTreeMap<i16, Vec<(Exponents, F)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            groups.entry(k).or_default().push((e2, c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, t)| (k as i64, Self::from_terms(&self.table, t)))
            .collect()
    }

    /// Leading term in the canonical order.
    pub fn leading(&self) -> Option<(&Exponents, &F)> {
        self.terms.first().map(|(e, c)| (e, c))
    }
}

pub(crate) fn zero_exps(n: usize) -> Exponents {
    smallvec::smallvec![0; n]
}

fn to_exp(e: i64) -> i16 {
    i16::try_from(e).expect("exponent out of range")
}

fn add_exps(a: &[i16], b: &[i16]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn accumulate<F: Field>(acc: &mut HashMap<Exponents, F>, e: Exponents, c: F) {
    match acc.get_mut(&e) {
        Some(v) => *v = v.clone() + c,
        None => {
            acc.insert(e, c);
        }
    }
}

impl<F: Field> fmt::Display for LaurentPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative_value();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (k, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.table.name(k).to_string()),
                    _ if x < 0 => factors.push(format!("{}^({})", self.table.name(k), x)),
                    _ => factors.push(format!("{}^{}", self.table.name(k), x)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for LaurentPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a, F: Field> $tr<&'a LaurentPoly<F>> for &'a LaurentPoly<F> {
            type Output = LaurentPoly<F>;
            /// Panics when the operands live over different variable tables.
            fn $m(self, rhs: &'a LaurentPoly<F>) -> LaurentPoly<F> {
                self.$try(rhs).expect("variable table mismatch")
            }
        }
        impl<F: Field> $tr<LaurentPoly<F>> for LaurentPoly<F> {
            type Output = LaurentPoly<F>;
            fn $m(self, rhs: LaurentPoly<F>) -> LaurentPoly<F> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, F: Field> $tr<&'a LaurentPoly<F>> for LaurentPoly<F> {
            type Output = LaurentPoly<F>;
            fn $m(self, rhs: &'a LaurentPoly<F>) -> LaurentPoly<F> {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<F: Field> Neg for &LaurentPoly<F> {
    type Output = LaurentPoly<F>;
    fn neg(self) -> LaurentPoly<F> {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        LaurentPoly { table: self.table.clone(), terms }
    }
}

impl<F: Field> Neg for LaurentPoly<F> {
    type Output = LaurentPoly<F>;
    fn neg(self) -> LaurentPoly<F> {
        -&self
    }
}
