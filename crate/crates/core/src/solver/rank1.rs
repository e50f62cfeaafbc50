use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::gram::{gram_matrix, GramError};
use crate::symbols::Symbols;
use crate::virasoro::{ModuleContext, ModuleVector, Partition};
use crate::{Poly, RatFunc};

use super::SolverError;

/// `sum_k c_1^k v_k` inside a Verma module, with `L_1` and `L_2` acting by
/// the prescribed eigenvalues.
#[derive(Clone, Debug)]
pub struct Rank1Series {
    pub ctx: Arc<ModuleContext<RatFunc>>,
    /// `L_1 v_k = first * v_{k-1}`.
    pub first: Poly,
    /// `L_2 v_k = second * v_{k-2}`.
    pub second: Poly,
    pub tail: Vec<ModuleVector<RatFunc>>,
}

impl Rank1Series {
    fn v(&self, k: i64) -> ModuleVector<RatFunc> {
        if k < 0 {
            ModuleVector::zero(&self.ctx)
        } else {
            self.tail[k as usize].clone()
        }
    }

    /// `(n, k, holds)` for the relations `L_1 v_k = first v_{k-1}` and
    /// `L_2 v_k = second v_{k-2}` and `L_n v_k = 0` for `n = 3, 4`.
    pub fn check_relations(&self) -> Vec<(i64, usize, bool)> {
        let first = RatFunc::from_poly(self.first.clone());
        let second = RatFunc::from_poly(self.second.clone());
        let mut out = Vec::new();
        for k in 0..self.tail.len() {
            let ki = k as i64;
            let v = &self.tail[k];
            out.push((1, k, v.apply_mode(1) == self.v(ki - 1).scale(&first)));
            out.push((2, k, v.apply_mode(2) == self.v(ki - 2).scale(&second)));
            for n in 3..=4 {
                out.push((n, k, v.apply_mode(n).is_zero()));
            }
        }
        out
    }
}

/// Solves level by level in the Verma module `ctx` for the rank-one vector
/// with eigenvalues `lambda1 = a c_1` and `lambda2 = b c_1^2`.
pub fn solve_rank1(
    sym: &Symbols,
    ctx: &Arc<ModuleContext<RatFunc>>,
    lambda1: &Poly,
    lambda2: &Poly,
    order: usize,
) -> Result<Rank1Series, SolverError> {
    let c1 = sym.c(1);
    let strip = |p: &Poly, n: u32| -> Result<Poly, SolverError> {
        let q = p.exact_div(&c1.pow(n)).map_err(|_| SolverError::BadEigenvalue(p.to_string()))?;
        if q.contains_var(sym.c_idx(1)) {
            return Err(SolverError::BadEigenvalue(p.to_string()));
        }
        Ok(q)
    };
    let first = strip(lambda1, 1)?;
    let second = strip(lambda2, 2)?;
    let mut series = Rank1Series { ctx: ctx.clone(), first, second, tail: vec![ModuleVector::cyclic(ctx)] };
    let mut lowered: HashMap<(i64, i64), ModuleVector<RatFunc>> = HashMap::new();
    for k in 1..=order as i64 {
        let mut targets = BTreeMap::new();
        for a in 1..=k {
            let w = lowering(&series, &mut lowered, a, k);
            let mu = Partition::new([a as u16]);
            if a == k && !w.constant_term().is_zero() {
                targets.insert(mu.clone(), w.constant_term());
            }
            w.tilde_walk(&mu, a as u32, (k - a) as u32, &mut targets, &mut |_, _| {});
        }
        targets.retain(|mu, _| mu.weight() == k as u32);
        let block = gram_matrix(ctx, k as u32, k as u32)?;
        let v = block.solve(&targets).map_err(|e| match e {
            GramError::SingularGram => SolverError::SingularShapovalov(k as u32),
            other => other.into(),
        })?;
        series.tail.push(v);
    }
    Ok(series)
}

/// `L_n v_k` expressed through lower `v_j`, via
/// `(n - 2) L_n = [L_{n-1}, L_1]`.
fn lowering(
    s: &Rank1Series,
    memo: &mut HashMap<(i64, i64), ModuleVector<RatFunc>>,
    n: i64,
    k: i64,
) -> ModuleVector<RatFunc> {
    if n > k || k < 0 {
        return ModuleVector::zero(&s.ctx);
    }
    if let Some(hit) = memo.get(&(n, k)) {
        return hit.clone();
    }
    let first = RatFunc::from_poly(s.first.clone());
    let out = match n {
        1 => s.v(k - 1).scale(&first),
        2 => s.v(k - 2).scale(&RatFunc::from_poly(s.second.clone())),
        _ => {
            let a = lowering(s, memo, n - 1, k - 1).scale(&first);
            let b = lowering(s, memo, n - 1, k).apply_mode(1);
            let inv = crate::Rational::new(1.into(), (n - 2).into());
            a.sub(&b).map_coeffs(|c| c.scale(&inv))
        }
    };
    memo.insert((n, k), out.clone());
    out
}

/// Verma context over rational functions with highest weight `Delta` and
/// central charge `central`.
pub fn verma_context(sym: &Symbols, central: &Poly) -> Arc<ModuleContext<RatFunc>> {
    ModuleContext::verma(RatFunc::from_poly(sym.delta()), RatFunc::from_poly(central.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Rank;
    use crate::virasoro::eigen::display_eigenvalues;

    #[test]
    fn first_levels() {
        let sym = Symbols::new(Rank::integer(1), 0);
        let ctx = verma_context(&sym, &sym.default_central());
        let eig = display_eigenvalues(&sym, 1, &sym.c0()).unwrap();
        let s = solve_rank1(&sym, &ctx, &eig[0], &eig[1], 3).unwrap();
        assert_eq!(s.tail[0], ModuleVector::cyclic(&ctx));
        let expected = RatFunc::new(sym.parse("Q - c0").unwrap(), sym.delta()).unwrap();
        assert_eq!(s.tail[1], ModuleVector::from_terms(&ctx, [(Partition::new([1]), expected)]));
        assert!(s.check_relations().iter().all(|&(_, _, ok)| ok));
    }

    #[test]
    fn rejects_bad_eigenvalue() {
        let sym = Symbols::new(Rank::integer(1), 0);
        let ctx = verma_context(&sym, &sym.default_central());
        let bad = solve_rank1(&sym, &ctx, &sym.q(), &sym.parse("-c1^2").unwrap(), 1);
        assert!(matches!(bad, Err(SolverError::BadEigenvalue(_))));
    }
}
