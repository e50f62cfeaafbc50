//! Gram matrices of constant terms and the descendant solve built on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ring::linalg::{self, Matrix};
use crate::ring::{Coefficient, Field, LaurentPoly, RingError};
use crate::virasoro::{partition_count, partitions_between, ModuleContext, ModuleVector, Partition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error("level range {0}..={1} is empty")]
    BadRange(u32, u32),
    #[error("no target supplied for {0}")]
    MissingTarget(Partition),
    #[error("Gram block is singular")]
    SingularGram,
    #[error("a quotient leaves the Laurent ring")]
    NotDivisible,
    #[error(
        "determinant {det} is not a rational multiple of the top eigenvalue to the power {expected_exponent} \
         (observed exponent: {observed})"
    )]
    ProportionalityFailure { det: String, expected_exponent: u64, observed: String },
}

impl From<RingError> for GramError {
    fn from(e: RingError) -> Self {
        match e {
            RingError::Singular => GramError::SingularGram,
            _ => GramError::NotDivisible,
        }
    }
}

/// Square block of constant terms `{L~_mu L_{-lambda} cyclic}` over all
/// partitions with weight in `lo..=hi`.
#[derive(Clone, Debug)]
pub struct GramBlock<C: Coefficient> {
    ctx: Arc<ModuleContext<C>>,
    lo: u32,
    hi: u32,
    index: Vec<Partition>,
    entries: Matrix<C>,
}

impl<C: Coefficient> GramBlock<C> {
    pub fn context(&self) -> &Arc<ModuleContext<C>> {
        &self.ctx
    }

    pub fn range(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    /// Row and column labels (identical).
    pub fn index(&self) -> &[Partition] {
        &self.index
    }

    pub fn entries(&self) -> &Matrix<C> {
        &self.entries
    }

    /// Entry in row `mu`, column `lambda`.
    pub fn entry(&self, mu: &Partition, lambda: &Partition) -> Option<&C> {
        let i = self.index.iter().position(|p| p == mu)?;
        let j = self.index.iter().position(|p| p == lambda)?;
        Some(&self.entries[i][j])
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn determinant(&self) -> C {
        linalg::determinant(&self.entries, &self.ctx.one()).expect("square by construction")
    }

    /// Coefficients `c_lambda` with `{L~_mu sum c_lambda L_{-lambda}} =
    /// targets[mu]` for every `mu` in the block.
    pub fn solve(&self, targets: &BTreeMap<Partition, C>) -> Result<ModuleVector<C>, GramError> {
        let zero = self.ctx.zero();
        let rhs: Vec<C> = self.index.iter().map(|mu| targets.get(mu).cloned().unwrap_or_else(|| zero.clone())).collect();
        if rhs.iter().all(|c| c.is_zero()) {
            return Ok(ModuleVector::zero(&self.ctx));
        }
        let x = linalg::solve(&self.entries, &rhs, &self.ctx.one())?;
        Ok(ModuleVector::from_terms(&self.ctx, self.index.iter().cloned().zip(x)))
    }
}

/// Gram block for weights `n..=m`.
pub fn gram_matrix<C: Coefficient>(ctx: &Arc<ModuleContext<C>>, n: u32, m: u32) -> Result<GramBlock<C>, GramError> {
    if n > m {
        return Err(GramError::BadRange(n, m));
    }
    let index = partitions_between(n, m);
    let mut entries = vec![vec![ctx.zero(); index.len()]; index.len()];
    for (j, lambda) in index.iter().enumerate() {
        let v = ModuleVector::basis(ctx, lambda.clone());
        let mut table = v.tilde_constant_terms(m);
        table.insert(Partition::empty(), v.constant_term());
        for (i, mu) in index.iter().enumerate() {
            if let Some(c) = table.remove(mu) {
                entries[i][j] = c;
            }
        }
    }
    Ok(GramBlock { ctx: ctx.clone(), lo: n, hi: m, index, entries })
}

/// Solves for the descendant with zero constant term whose shifted-word
/// constant terms equal `targets` for `1 <= |mu| <= max_level`.
///
/// Every partition in range must have a target; zero targets may be given
/// explicitly or left out by passing `allow_sparse = true`.
pub fn solve_descendants<C: Coefficient>(
    ctx: &Arc<ModuleContext<C>>,
    targets: &BTreeMap<Partition, C>,
    max_level: u32,
    allow_sparse: bool,
) -> Result<ModuleVector<C>, GramError> {
    if max_level == 0 {
        return Ok(ModuleVector::zero(ctx));
    }
    let block = gram_matrix(ctx, 1, max_level)?;
    if !allow_sparse {
        if let Some(mu) = block.index.iter().find(|mu| !targets.contains_key(*mu)) {
            return Err(GramError::MissingTarget(mu.clone()));
        }
    }
    block.solve(targets)
}

/// `sum_{i=n}^{m} i p(i)`.
pub fn expected_exponent(n: u32, m: u32) -> u64 {
    (n..=m).map(|i| i as u64 * partition_count(i)).sum()
}

/// `sum of lengths` over all partitions with weight in `n..=m`.
pub fn total_length(n: u32, m: u32) -> u64 {
    partitions_between(n, m).iter().map(|p| p.len() as u64).sum()
}

/// Outcome of a determinant proportionality check.
#[derive(Clone, Debug)]
pub struct GramDeterminant<F: Field> {
    pub det: LaurentPoly<F>,
    pub expected_monomial: LaurentPoly<F>,
    pub ratio: F,
    pub exponent: u64,
}

/// Exponent `k` with `det = rational * base^k`, if any.
pub fn observed_exponent<F: Field>(det: &LaurentPoly<F>, base: &LaurentPoly<F>, max: u64) -> Option<(u64, F)> {
    if det.is_zero() {
        return None;
    }
    let mut rest = det.clone();
    for k in 0..=max {
        if let Some(c) = rest.constant_value() {
            return Some((k, c));
        }
        rest = rest.exact_div(base).ok()?;
    }
    None
}

/// Checks `det = ratio * top^(sum i p(i))` where `top` is the eigenvalue of
/// `L_{2 rank}` on the cyclic vector.
pub fn gram_det_verify<F: Field>(
    ctx: &Arc<ModuleContext<LaurentPoly<F>>>,
    n: u32,
    m: u32,
) -> Result<GramDeterminant<F>, GramError> {
    let block = gram_matrix(ctx, n, m)?;
    let det = block.determinant();
    let top = ctx.eigenvalue(2 * ctx.rank() as i64).expect("top mode is an eigen mode");
    let exponent = expected_exponent(n, m);
    let expected_monomial = top.pow(exponent as u32);
    let ratio = det.exact_div(&expected_monomial).ok().and_then(|q| q.constant_value()).filter(|c| !c.is_zero());
    match ratio {
        Some(ratio) => Ok(GramDeterminant { det, expected_monomial, ratio, exponent }),
        None => {
            let observed = match observed_exponent(&det, &top, 4 * exponent + 4) {
                Some((k, c)) => format!("{k} with ratio {c}"),
                None => "none".into(),
            };
            Err(GramError::ProportionalityFailure { det: det.to_string(), expected_exponent: exponent, observed })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::virasoro::module::tests::{abstract_ctx, abstract_table};
    use num_rational::BigRational;

    type P = LaurentPoly<BigRational>;

    fn p(s: &str) -> P {
        P::parse(&abstract_table(), s).unwrap()
    }

    #[test]
    fn small_blocks() {
        let ctx = abstract_ctx(1);
        let b = gram_matrix(&ctx, 1, 1).unwrap();
        assert_eq!(b.entries(), &vec![vec![p("2*E2")]]);
        let b0 = gram_matrix(&ctx, 0, 0).unwrap();
        assert_eq!(b0.entries(), &vec![vec![p("1")]]);
        let b12 = gram_matrix(&ctx, 1, 2).unwrap();
        assert_eq!(b12.dim(), 3);
        let one = Partition::new([1]);
        assert_eq!(b12.entry(&one, &one), Some(&p("2*E2")));
        assert!(gram_matrix(&ctx, 2, 1).is_err());
    }

    #[test]
    fn entries_match_direct_words() {
        let ctx = abstract_ctx(2);
        let b = gram_matrix(&ctx, 1, 3).unwrap();
        for (i, mu) in b.index().iter().enumerate() {
            for (j, lambda) in b.index().iter().enumerate() {
                let direct = ModuleVector::basis(&ctx, lambda.clone()).apply_tilde_word(mu).constant_term();
                assert_eq!(b.entries()[i][j], direct, "{mu} {lambda}");
            }
        }
    }

    #[test]
    fn determinant_single_level() {
        let ctx = abstract_ctx(1);
        let d = gram_det_verify(&ctx, 1, 1).unwrap();
        assert_eq!(d.ratio, BigRational::from_integer(2.into()));
        assert_eq!(d.expected_monomial, p("E2"));
        let d0 = gram_det_verify(&ctx, 0, 0).unwrap();
        assert_eq!(d0.det, p("1"));
    }

    #[test]
    fn determinant_exponent_counts_parts() {
        for rho in 1..=2 {
            let ctx = abstract_ctx(rho);
            let top = ctx.eigenvalue(2 * rho as i64).unwrap();
            for m in 1..=3 {
                let det = gram_matrix(&ctx, 1, m).unwrap().determinant();
                let (k, _) = observed_exponent(&det, &top, 50).expect("monomial determinant");
                assert_eq!(k, total_length(1, m), "rank {rho}, m {m}");
            }
        }
        assert_eq!(expected_exponent(1, 2), 5);
        assert_eq!(total_length(1, 2), 4);
    }

    #[test]
    fn solve_single() {
        let ctx = abstract_ctx(1);
        let targets = BTreeMap::from([(Partition::new([1]), p("u"))]);
        let v = solve_descendants(&ctx, &targets, 1, false).unwrap();
        assert_eq!(v.coeff(&Partition::new([1])) * p("2*E2"), p("u"));
        let zero = solve_descendants(&ctx, &BTreeMap::new(), 2, true).unwrap();
        assert!(zero.is_zero());
        assert!(matches!(solve_descendants(&ctx, &targets, 2, false), Err(GramError::MissingTarget(_))));
    }

    #[test]
    fn solve_round_trip() {
        let ctx = abstract_ctx(2);
        let v = ModuleVector::from_terms(
            &ctx,
            [
                (Partition::new([1]), p("u")),
                (Partition::new([2, 1]), p("w*E3")),
                (Partition::new([1, 1, 1]), p("3")),
                (Partition::new([3]), p("u*w - 1")),
            ],
        );
        let targets = v.tilde_constant_terms(3);
        assert_eq!(solve_descendants(&ctx, &targets, 3, true).unwrap(), v);
    }
}
