use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::frames::{self, CanonicalOperator, WeightTable};
use crate::gram::{gram_matrix, GramBlock};
use crate::symbols::{Rank, RankKind, Symbols};
use crate::virasoro::eigen::{half_base_context, integer_base_context};
use crate::virasoro::{ModuleContext, ModuleVector, Partition};
use crate::Poly;

use super::{lstar_residual, IrregularSeries, SolverError, UnknownLedger, UnknownStatus};

/// Knobs shared by the recursive solvers.
#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    /// Central charge as an expression in the roster variables; defaults to
    /// `1 + 6 Q^2`.
    pub central: Option<String>,
}

/// Integer rank `r`, expansion in `c_r`.
pub fn solve_integer(r: usize, order: usize) -> Result<IrregularSeries, SolverError> {
    solve(Rank::integer(r), order, &SolverOptions::default())
}

/// Half-integer rank `r - 1/2`, expansion in `Lambda`.
pub fn solve_half(r: usize, order: usize) -> Result<IrregularSeries, SolverError> {
    solve(Rank::half(r), order, &SolverOptions::default())
}

/// Everything a series needs besides its solved data: roster, base module,
/// eigenvalue tables and canonical operator.
#[derive(Clone, Debug)]
pub struct SeriesSetup {
    pub symbols: Symbols,
    pub base: Arc<ModuleContext<Poly>>,
    pub weights: WeightTable,
    pub lstar: CanonicalOperator,
}

impl SeriesSetup {
    pub fn new(rank: Rank, order: usize, opts: &SolverOptions) -> Result<Self, SolverError> {
        if rank.r < 2 {
            return Err(SolverError::RankTooSmall(rank.r));
        }
        let sym = Symbols::new(rank, order);
        let central = match &opts.central {
            Some(src) => sym.parse(src).map_err(|e| SolverError::BadExpression(e.to_string()))?,
            None => sym.default_central(),
        };
        let (base, lstar) = match rank.kind {
            RankKind::Integer => {
                let frame = frames::build_frame_integer(&sym)?;
                (integer_base_context(&sym, &central), frames::build_lstar_integer(&sym, &frame)?)
            }
            RankKind::Half => {
                let fields = frames::build_half_fields(&sym)?;
                let frame = frames::build_frame_half(&sym, &fields)?;
                (half_base_context(&sym, &central), frames::build_lstar_half(&sym, &frame)?.0)
            }
        };
        let weights = WeightTable::new(&sym);
        Ok(SeriesSetup { symbols: sym, base, weights, lstar })
    }

    /// Attaches stored prefactor data and tail coefficients.
    pub fn assemble(self, nu: Poly, g: Vec<Poly>, tail: Vec<ModuleVector<Poly>>, ledger: UnknownLedger) -> IrregularSeries {
        let SeriesSetup { symbols, base, weights, lstar } = self;
        IrregularSeries { symbols, base, weights, lstar, g, nu, tail, ledger, gauge: None }
    }
}

pub fn solve(rank: Rank, order: usize, opts: &SolverOptions) -> Result<IrregularSeries, SolverError> {
    let SeriesSetup { symbols: sym, base, weights, lstar } = SeriesSetup::new(rank, order, opts)?;
    let mut state = State {
        g: (1..rank.r).map(|j| sym.g(j)).collect(),
        nu: sym.nu(),
        tail: vec![ModuleVector::cyclic(&base)],
        truncated: Vec::new(),
        ledger: UnknownLedger::new(&sym),
        grams: HashMap::new(),
        sym,
        base,
        weights,
        lstar,
    };
    for k in 0..=order {
        state.step(k)?;
    }
    let State { sym, base, weights, lstar, g, nu, tail, ledger, .. } = state;
    Ok(SeriesSetup { symbols: sym, base, weights, lstar }.assemble(nu, g, tail, ledger))
}

struct State {
    sym: Symbols,
    base: Arc<ModuleContext<Poly>>,
    weights: WeightTable,
    lstar: CanonicalOperator,
    g: Vec<Poly>,
    nu: Poly,
    tail: Vec<ModuleVector<Poly>>,
    truncated: Vec<ModuleVector<Poly>>,
    ledger: UnknownLedger,
    grams: HashMap<u32, GramBlock<Poly>>,
}

impl State {
    fn v(&self, k: i64) -> ModuleVector<Poly> {
        if k < 0 {
            ModuleVector::zero(&self.base)
        } else {
            self.tail[k as usize].clone()
        }
    }

    /// Right-hand side of `L~_n v_k` for `n = a + r - 1`, as `(j, coef)`
    /// meaning `coef * v_{k-j}`.
    fn relation(&self, a: usize) -> Vec<(i64, Poly)> {
        let sym = &self.sym;
        let r = sym.r();
        match sym.rank().kind {
            RankKind::Integer if a == 1 => vec![(1, &sym.q().scale_int(r as i64 + 1) - &sym.c0())],
            RankKind::Integer if a <= r => vec![(1, sym.c(a as i64 - 1).scale_int(-2))],
            RankKind::Integer if a == r + 1 => vec![(2, sym.int(-1))],
            RankKind::Half if a == r => vec![(1, sym.one())],
            _ => Vec::new(),
        }
    }

    fn targets(&self, k: usize, max_level: u32) -> BTreeMap<Partition, Poly> {
        let mut out = BTreeMap::new();
        for a in 1..=max_level {
            let mut w = ModuleVector::zero(&self.base);
            for (j, c) in self.relation(a as usize) {
                w = w.add(&self.v(k as i64 - j).scale(&c));
            }
            if w.is_zero() {
                continue;
            }
            let mu = Partition::new([a as u16]);
            let ct = w.constant_term();
            if !ct.is_zero() {
                out.insert(mu.clone(), ct);
            }
            w.tilde_walk(&mu, a, max_level - a, &mut out, &mut |_, _| {});
        }
        out
    }

    fn gram(&mut self, max_level: u32) -> Result<&GramBlock<Poly>, SolverError> {
        if !self.grams.contains_key(&max_level) {
            let block = gram_matrix(&self.base, 1, max_level)?;
            self.grams.insert(max_level, block);
        }
        Ok(&self.grams[&max_level])
    }

    fn step(&mut self, k: usize) -> Result<(), SolverError> {
        if k >= 1 {
            let max_level = (self.sym.r() * k) as u32;
            let targets = self.targets(k, max_level);
            let descendants = self.gram(max_level)?.solve(&targets)?;
            let constant = ModuleVector::cyclic(&self.base).scale(&self.sym.big_c(k));
            self.tail.push(descendants.add(&constant));
        }
        let mut z = {
            let v = |j: i64| self.v(j);
            lstar_residual(&self.sym, &self.weights, &self.lstar, &self.nu, &self.g, &v, k)
        };
        if let Some(entry) = self.ledger.scheduled(k).cloned() {
            let value = self.pivot(k, &entry.var, &entry.name, &z.constant_term())?;
            self.substitute(entry.var, &value)?;
            z = z.try_map_coeffs(|c| c.substitute(entry.var, &value))?;
            self.ledger.entries[k].status = UnknownStatus::Solved { order: k, value };
        }
        if !z.is_zero() {
            return Err(SolverError::ResidualNonZero { order: k, residual: z.to_string() });
        }
        self.check_truncated_state(k)
    }

    /// Solves the affine constant-term equation for `var`.
    fn pivot(&self, k: usize, var: &usize, name: &str, eq: &Poly) -> Result<Poly, SolverError> {
        let non_affine =
            || SolverError::NonAffineElimination { order: k, unknown: name.to_string(), equation: eq.to_string() };
        let mut rest = self.sym.zero();
        let mut coef = self.sym.zero();
        for (deg, part) in eq.split_by(*var) {
            match deg {
                0 => rest = part,
                1 => coef = part,
                _ => return Err(non_affine()),
            }
        }
        let others = self.ledger.pending_vars();
        let leaks = |p: &Poly| others.iter().any(|&u| u != *var && p.contains_var(u));
        if coef.is_zero() || leaks(&coef) || leaks(&rest) {
            return Err(non_affine());
        }
        let inv = coef.unit_inverse().ok_or_else(|| SolverError::NonUnitPivot {
            order: k,
            unknown: name.to_string(),
            pivot: coef.to_string(),
        })?;
        Ok(-(&rest * &inv))
    }

    fn substitute(&mut self, var: usize, value: &Poly) -> Result<(), SolverError> {
        for v in self.tail.iter_mut().chain(self.truncated.iter_mut()) {
            *v = v.try_map_coeffs(|c| c.substitute(var, value))?;
        }
        for g in self.g.iter_mut() {
            *g = g.substitute(var, value)?;
        }
        self.nu = self.nu.substitute(var, value)?;
        Ok(())
    }

    /// `X_k = v_k - sum_{i=max(1,k-r+1)}^{k} C_i X_{k-i}` has no constant
    /// term and no pending constant-term unknowns.
    fn check_truncated_state(&mut self, k: usize) -> Result<(), SolverError> {
        let r = self.sym.r();
        let mut x = self.tail[k].clone();
        for i in k.saturating_sub(r - 1).max(1)..=k {
            let ci = self.current_big_c(i);
            x = x.sub(&self.truncated[k - i].scale(&ci));
        }
        let pending: Vec<usize> =
            self.ledger.pending_vars().into_iter().filter(|&u| (1..=self.sym.order()).any(|i| self.sym.big_c_idx(i) == u)).collect();
        let leaks = x.terms().values().any(|c| pending.iter().any(|&u| c.contains_var(u)));
        if (k > 0 && !x.constant_term().is_zero()) || leaks {
            return Err(SolverError::ResidualNonZero { order: k, residual: format!("truncated state {x}") });
        }
        self.truncated.push(x);
        Ok(())
    }

    fn current_big_c(&self, i: usize) -> Poly {
        let var = self.sym.big_c_idx(i);
        self.ledger.value(var).cloned().unwrap_or_else(|| self.sym.big_c(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_rank_two_leading_exponent() {
        let s = solve_integer(2, 2).unwrap();
        let expected = s.symbols.parse("c1^2*(c0 - c0p)/2").unwrap();
        assert_eq!(s.g_j(1), &expected);
    }

    #[test]
    fn half_rank_three_halves_leading_exponent() {
        let s = solve_half(2, 2).unwrap();
        let expected = s.symbols.parse("-2*(2*Q - c0)*c1^3/3").unwrap();
        assert_eq!(s.g_j(1), &expected);
    }

    #[test]
    fn support_bound() {
        let s = solve_integer(2, 3).unwrap();
        for (k, v) in s.tail.iter().enumerate() {
            assert!(v.max_level().unwrap_or(0) as usize <= 2 * k);
        }
    }
}
