use crate::frames::{self, CanonicalOperator};
use crate::symbols::RankKind;
use crate::virasoro::{ModuleVector, Partition};
use crate::Poly;

use super::{lstar_residual, IrregularSeries};

/// Outcome for one defining relation across the orders checked.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationCheck {
    pub relation: String,
    /// Highest order at which the relation was evaluated.
    pub window: usize,
    /// First order with a nonzero residual, and that residual.
    pub failure: Option<(usize, String)>,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<RelationCheck>,
}

impl VerifyReport {
    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(RelationCheck::holds)
    }
}

fn record(relation: String, window: usize, residuals: impl Iterator<Item = (usize, ModuleVector<Poly>)>) -> RelationCheck {
    let failure = residuals.filter(|(_, z)| !z.is_zero()).map(|(k, z)| (k, z.to_string())).next();
    RelationCheck { relation, window, failure }
}

/// Re-derives every defining relation from the eigenvalue tables and a
/// freshly built canonical operator.
pub fn verify_canonical(series: &IrregularSeries) -> VerifyReport {
    let sym = &series.symbols;
    let r = sym.r();
    let order = series.order();
    let t = sym.expansion_idx();
    let v = |k: i64| series.v(k);
    let mut checks = Vec::new();

    let (top, target): (usize, Box<dyn Fn(usize) -> Poly>) = match sym.rank().kind {
        RankKind::Integer => (2 * r, Box::new(|n| series.weights.target_eigenvalue(n).cloned().unwrap_or_else(|| sym.zero()))),
        RankKind::Half => (2 * r - 1, Box::new(|n| frames::half_scalar(sym, n))),
    };
    for n in r..=top + 2 {
        let lambda = if n <= top { target(n) } else { sym.zero() };
        let parts = lambda.split_by(t);
        let residuals = (0..=order).map(|k| {
            let mut z = series.tail[k].apply_mode(n as i64);
            for (j, c) in &parts {
                z = z.sub(&v(k as i64 - j).scale(c));
            }
            (k, z)
        });
        let name = if n <= top { format!("L_{n} eigenvalue") } else { format!("L_{n} annihilates") };
        checks.push(record(name, order, residuals));
    }

    let lstar = match fresh_operator(series) {
        Ok(op) => op,
        Err(e) => {
            checks.push(RelationCheck { relation: "canonical operator".into(), window: 0, failure: Some((0, e)) });
            return VerifyReport { checks };
        }
    };
    let residuals = (0..=order).map(|k| (k, lstar_residual(sym, &series.weights, &lstar, &series.nu, &series.g, &v, k)));
    checks.push(record("L* equals t^r d/dt".into(), order, residuals));

    let normalized = series.tail[0] == ModuleVector::cyclic(&series.base);
    checks.push(RelationCheck {
        relation: "v_0 is the cyclic vector".into(),
        window: 0,
        failure: (!normalized).then(|| (0, series.tail[0].to_string())),
    });
    VerifyReport { checks }
}

fn fresh_operator(series: &IrregularSeries) -> Result<CanonicalOperator, String> {
    let sym = &series.symbols;
    let built = match sym.rank().kind {
        RankKind::Integer => frames::build_frame_integer(sym).and_then(|f| frames::build_lstar_integer(sym, &f)),
        RankKind::Half => frames::build_half_fields(sym)
            .and_then(|v| frames::build_frame_half(sym, &v))
            .and_then(|f| frames::build_lstar_half(sym, &f).map(|(op, _)| op)),
    };
    built.map_err(|e| e.to_string())
}

/// A single-coefficient change to a series, used to probe uniqueness.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    /// `g_j += 1`.
    Exponent(usize),
    /// `nu += 1`.
    Nu,
    /// Coefficient of `lambda` in `v_k` `+= 1` (empty `lambda` is the
    /// constant term).
    Coefficient { order: usize, partition: Partition },
}

/// Copy of `series` with one coefficient shifted by one.
pub fn perturb(series: &IrregularSeries, p: &Perturbation) -> IrregularSeries {
    let mut out = series.clone();
    let one = series.symbols.one();
    match p {
        Perturbation::Exponent(j) => out.g[j - 1] = &out.g[j - 1] + &one,
        Perturbation::Nu => out.nu = &out.nu + &one,
        Perturbation::Coefficient { order, partition } => {
            let bump = ModuleVector::from_terms(&series.base, [(partition.clone(), one)]);
            out.tail[*order] = out.tail[*order].add(&bump);
        }
    }
    out
}
