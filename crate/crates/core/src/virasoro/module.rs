//! Irregular Verma modules and PBW straightening.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::ring::{Coefficient, Field};

use super::partition::Partition;

type Terms<C> = BTreeMap<Partition, C>;

/// Cyclic module of rank `rho` over the Virasoro algebra.
///
/// The cyclic vector is annihilated by `L_n` for `n > 2 rho` and is an
/// eigenvector of `L_n` for `rho <= n <= 2 rho`. The basis vector indexed by
/// a partition `lambda` is `L_{rho - lambda_1} ... L_{rho - lambda_l}` applied
/// to the cyclic vector. Rank zero is the ordinary Verma module, whose single
/// eigenvalue is the highest weight.
pub struct ModuleContext<C: Coefficient> {
    rank: i64,
    eigen: Vec<C>,
    central: C,
    memo: Mutex<HashMap<(i64, Partition), Arc<Terms<C>>>>,
}

impl<C: Coefficient> ModuleContext<C> {
    /// `eigen[i]` is the eigenvalue of `L_{rank + i}`; exactly `rank + 1`
    /// values are expected.
    pub fn new(rank: usize, eigen: Vec<C>, central: C) -> Arc<Self> {
        assert_eq!(eigen.len(), rank + 1, "need one eigenvalue per mode rank..=2*rank");
        Arc::new(ModuleContext { rank: rank as i64, eigen, central, memo: Mutex::new(HashMap::new()) })
    }

    /// Verma module with highest weight `delta`.
    pub fn verma(delta: C, central: C) -> Arc<Self> {
        Self::new(0, vec![delta], central)
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn central(&self) -> &C {
        &self.central
    }

    /// Eigenvalue of `L_n` on the cyclic vector (zero beyond `2 rank`).
    /// `None` for creation modes.
    pub fn eigenvalue(&self, n: i64) -> Option<C> {
        if n < self.rank {
            None
        } else if n <= 2 * self.rank {
            Some(self.eigen[(n - self.rank) as usize].clone())
        } else {
            Some(self.zero())
        }
    }

    /// Eigenvalue used by the shifted operator `L_n - eigenvalue`; zero for
    /// creation modes.
    pub fn shift(&self, n: i64) -> C {
        self.eigenvalue(n).unwrap_or_else(|| self.zero())
    }

    pub fn zero(&self) -> C {
        self.central.zero_like()
    }

    pub fn one(&self) -> C {
        self.central.one_like()
    }

    /// Mode of the Virasoro generator encoding partition part `p`.
    pub fn mode_of_part(&self, p: u16) -> i64 {
        self.rank - p as i64
    }

    /// Number of cached straightening results.
    pub fn cache_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    /// `L_n` applied to a basis vector, in normal form.
    fn apply_basis(&self, n: i64, lambda: &Partition) -> Arc<Terms<C>> {
        let key = (n, lambda.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.straighten(n, lambda));
        self.memo.lock().unwrap().insert(key, result.clone());
        result
    }

    fn straighten(&self, n: i64, lambda: &Partition) -> Terms<C> {
        let mut out = Terms::new();
        let Some(first) = lambda.largest() else {
            if n < self.rank {
                out.insert(Partition::new([(self.rank - n) as u16]), self.one());
            } else if let Some(e) = self.eigenvalue(n) {
                if !e.is_zero() {
                    out.insert(Partition::empty(), e);
                }
            }
            return out;
        };
        let m1 = self.mode_of_part(first);
        if n < self.rank && n <= m1 {
            out.insert(lambda.with_leading((self.rank - n) as u16), self.one());
            return out;
        }
        // L_n L_m1 X = L_m1 L_n X + (n - m1) L_{n+m1} X + central term
        let tail = lambda.tail();
        let inner = self.apply_basis(n, &tail);
        for (mu, c) in inner.iter() {
            add_scaled(&mut out, &self.apply_basis(m1, mu), Some(c));
        }
        let shifted = self.apply_basis(n + m1, &tail);
        let factor = self.one().scale_int(n - m1);
        add_scaled(&mut out, &shifted, Some(&factor));
        if n + m1 == 0 && n.abs() > 1 {
            let c = self
                .central
                .scale(&<C::Scalar as Field>::from_ratio(n * n * n - n, 12));
            add_to(&mut out, tail, c);
        }
        out
    }
}

impl<C: Coefficient> fmt::Debug for ModuleContext<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleContext").field("rank", &self.rank).field("eigen", &self.eigen).field("central", &self.central).finish()
    }
}

fn add_to<C: Coefficient>(acc: &mut Terms<C>, key: Partition, c: C) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(v) => {
            let s = v.add(&c);
            if s.is_zero() {
                acc.remove(&key);
            } else {
                *v = s;
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

fn add_scaled<C: Coefficient>(acc: &mut Terms<C>, src: &Terms<C>, factor: Option<&C>) {
    for (k, v) in src {
        let c = match factor {
            Some(f) => f.mul(v),
            None => v.clone(),
        };
        add_to(acc, k.clone(), c);
    }
}

/// Finite combination of basis vectors of a [`ModuleContext`].
#[derive(Clone)]
pub struct ModuleVector<C: Coefficient> {
    ctx: Arc<ModuleContext<C>>,
    terms: Terms<C>,
}

impl<C: Coefficient> PartialEq for ModuleVector<C> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl<C: Coefficient> ModuleVector<C> {
    pub fn zero(ctx: &Arc<ModuleContext<C>>) -> Self {
        ModuleVector { ctx: ctx.clone(), terms: Terms::new() }
    }

    pub fn cyclic(ctx: &Arc<ModuleContext<C>>) -> Self {
        Self::basis(ctx, Partition::empty())
    }

    pub fn basis(ctx: &Arc<ModuleContext<C>>, lambda: Partition) -> Self {
        Self::from_terms(ctx, [(lambda, ctx.one())])
    }

    pub fn from_terms(ctx: &Arc<ModuleContext<C>>, terms: impl IntoIterator<Item = (Partition, C)>) -> Self {
        let mut acc = Terms::new();
        for (k, v) in terms {
            add_to(&mut acc, k, v);
        }
        ModuleVector { ctx: ctx.clone(), terms: acc }
    }

    pub fn context(&self) -> &Arc<ModuleContext<C>> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Partition, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, lambda: &Partition) -> C {
        self.terms.get(lambda).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// Coefficient of the cyclic vector.
    pub fn constant_term(&self) -> C {
        self.coeff(&Partition::empty())
    }

    /// Largest partition weight in the support.
    pub fn max_level(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.weight()).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        add_scaled(&mut out, &other.terms, None);
        ModuleVector { ctx: self.ctx.clone(), terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.map_coeffs(|x| x.scale_int(n))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&C) -> C) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, v)| {
                let c = f(v);
                (!c.is_zero()).then(|| (k.clone(), c))
            })
            .collect();
        ModuleVector { ctx: self.ctx.clone(), terms }
    }

    /// Fallible variant of [`map_coeffs`](Self::map_coeffs).
    pub fn try_map_coeffs<E>(&self, mut f: impl FnMut(&C) -> Result<C, E>) -> Result<Self, E> {
        let mut terms = Terms::new();
        for (k, v) in &self.terms {
            let c = f(v)?;
            if !c.is_zero() {
                terms.insert(k.clone(), c);
            }
        }
        Ok(ModuleVector { ctx: self.ctx.clone(), terms })
    }

    /// `L_n` applied to this vector, in PBW normal form.
    pub fn apply_mode(&self, n: i64) -> Self {
        let mut out = Terms::new();
        for (lambda, c) in &self.terms {
            add_scaled(&mut out, &self.ctx.apply_basis(n, lambda), Some(c));
        }
        ModuleVector { ctx: self.ctx.clone(), terms: out }
    }

    /// `(L_n - eigenvalue_n)` applied to this vector.
    pub fn apply_shifted(&self, n: i64) -> Self {
        let e = self.ctx.shift(n);
        let moved = self.apply_mode(n);
        if e.is_zero() {
            moved
        } else {
            moved.sub(&self.scale(&e))
        }
    }

    /// Applies `L_{m_1} ... L_{m_k}` (rightmost first).
    pub fn apply_word(&self, modes: &[i64]) -> Self {
        modes.iter().rev().fold(self.clone(), |v, &m| v.apply_mode(m))
    }

    /// Shifted word for `mu`: the factor for the largest part `mu_1` acts
    /// first, each part `p` contributing `L_{p + rank} - eigenvalue`.
    pub fn apply_tilde_word(&self, mu: &Partition) -> Self {
        let rank = self.ctx.rank;
        mu.parts().iter().fold(self.clone(), |v, &p| v.apply_shifted(p as i64 + rank))
    }

    /// Constant terms of the shifted words for every partition `mu` with
    /// `1 <= |mu| <= max_weight`, sharing work along common word prefixes.
    pub fn tilde_constant_terms(&self, max_weight: u32) -> BTreeMap<Partition, C> {
        let mut out = BTreeMap::new();
        self.tilde_walk(&Partition::empty(), max_weight, max_weight, &mut out, &mut |_, _| {});
        out
    }

    /// Depth-first walk over shifted words. `visit` sees every intermediate
    /// vector together with the partition applied so far.
    pub fn tilde_walk(
        &self,
        prefix: &Partition,
        max_part: u32,
        budget: u32,
        out: &mut BTreeMap<Partition, C>,
        visit: &mut dyn FnMut(&Partition, &Self),
    ) {
        let rank = self.ctx.rank;
        for a in 1..=max_part.min(budget) {
            let w = self.apply_shifted(a as i64 + rank);
            let mu = prefix.with_trailing(a as u16);
            if w.is_zero() {
                continue;
            }
            visit(&mu, &w);
            let ct = w.constant_term();
            if !ct.is_zero() {
                out.insert(mu.clone(), ct);
            }
            w.tilde_walk(&mu, a, budget - a, out, visit);
        }
    }
}

impl<C: Coefficient> fmt::Display for ModuleVector<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format!("[{v}] L{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coefficient> fmt::Debug for ModuleVector<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ring::{LaurentPoly, VarTable};
    use num_rational::BigRational;

    type P = LaurentPoly<BigRational>;

    pub(crate) fn abstract_table() -> Arc<VarTable> {
        VarTable::new([("c", 0), ("E0", 0), ("E1", 1), ("E2", 2), ("E3", 3), ("E4", 4), ("u", 0), ("w", 0)]).unwrap()
    }

    /// Rank-`rho` context whose eigenvalues are the free symbols `E_n`.
    pub(crate) fn abstract_ctx(rho: usize) -> Arc<ModuleContext<P>> {
        let t = abstract_table();
        let eigen = (rho..=2 * rho).map(|n| P::var(&t, &format!("E{n}")).unwrap()).collect();
        ModuleContext::new(rho, eigen, P::var(&t, "c").unwrap())
    }

    /// Independent normal ordering: repeatedly move the rightmost
    /// non-creation mode to the right, then bubble-sort creation modes.
    pub(crate) fn brute_force(ctx: &ModuleContext<P>, word: &[i64]) -> BTreeMap<Partition, P> {
        let rank = ctx.rank() as i64;
        let mut out: BTreeMap<Partition, P> = BTreeMap::new();
        let mut stack: Vec<(P, Vec<i64>)> = vec![(ctx.one(), word.to_vec())];
        while let Some((coef, w)) = stack.pop() {
            if coef.is_zero() {
                continue;
            }
            if let Some(i) = w.iter().rposition(|&m| m >= rank) {
                let a = w[i];
                if i == w.len() - 1 {
                    let e = ctx.eigenvalue(a).unwrap();
                    stack.push((&coef * &e, w[..i].to_vec()));
                } else {
                    let b = w[i + 1];
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    stack.push((coef.clone(), swapped));
                    push_commutator(ctx, &mut stack, &coef, &w, i, a, b);
                }
                continue;
            }
            if let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
                let (a, b) = (w[i], w[i + 1]);
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((coef.clone(), swapped));
                push_commutator(ctx, &mut stack, &coef, &w, i, a, b);
                continue;
            }
            let lambda = Partition::new(w.iter().map(|&m| (rank - m) as u16));
            let entry = out.entry(lambda).or_insert_with(|| ctx.zero());
            *entry = &*entry + &coef;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn push_commutator(
        ctx: &ModuleContext<P>,
        stack: &mut Vec<(P, Vec<i64>)>,
        coef: &P,
        w: &[i64],
        i: usize,
        a: i64,
        b: i64,
    ) {
        let mut merged = w[..i].to_vec();
        merged.push(a + b);
        merged.extend_from_slice(&w[i + 2..]);
        stack.push((coef.scale_int(a - b), merged));
        if a + b == 0 {
            let mut dropped = w[..i].to_vec();
            dropped.extend_from_slice(&w[i + 2..]);
            let c = (coef * ctx.central()).scale(&BigRational::new((a * a * a - a).into(), 12.into()));
            stack.push((c, dropped));
        }
    }

    fn vec_of(ctx: &Arc<ModuleContext<P>>, terms: &[(&[u16], &str)]) -> ModuleVector<P> {
        let t = abstract_table();
        ModuleVector::from_terms(
            ctx,
            terms.iter().map(|(p, s)| (Partition::new(p.iter().copied()), P::parse(&t, s).unwrap())),
        )
    }

    #[test]
    fn eigen_mode_on_cyclic() {
        let ctx = abstract_ctx(1);
        let v = ModuleVector::cyclic(&ctx).apply_mode(1);
        assert_eq!(v, vec_of(&ctx, &[(&[], "E1")]));
    }

    #[test]
    fn one_commutator() {
        let ctx = abstract_ctx(1);
        let v = ModuleVector::basis(&ctx, Partition::new([1])).apply_mode(2);
        assert_eq!(v, vec_of(&ctx, &[(&[1], "E2"), (&[], "2*E2")]));
    }

    #[test]
    fn central_term() {
        let ctx = abstract_ctx(1);
        let v = ModuleVector::basis(&ctx, Partition::new([4])).apply_mode(3);
        assert_eq!(v, vec_of(&ctx, &[(&[1], "6"), (&[], "2*c")]));
    }

    #[test]
    fn tilde_words() {
        let ctx = abstract_ctx(1);
        let l0 = ModuleVector::basis(&ctx, Partition::new([1]));
        assert_eq!(l0.apply_tilde_word(&Partition::empty()), l0);
        let out = l0.apply_tilde_word(&Partition::new([1]));
        assert_eq!(out, vec_of(&ctx, &[(&[], "2*E2")]));
        assert_eq!(out.constant_term(), P::parse(&abstract_table(), "2*E2").unwrap());
        assert!(ModuleVector::cyclic(&ctx).apply_tilde_word(&Partition::new([1])).is_zero());
        assert!(ModuleVector::cyclic(&ctx).constant_term().is_one());
        assert!(l0.constant_term().is_zero());
    }

    #[test]
    fn straightening_matches_brute_force() {
        for rho in 0..=2usize {
            let ctx = abstract_ctx(rho);
            let words: &[&[i64]] = &[&[3, -2, 1, -1], &[2, 2, -1, -3, 0], &[4, -4, -1], &[1, 0, -2, 5, -3], &[-1, 3, -2, 2, -1]];
            for w in words {
                let fast = ModuleVector::cyclic(&ctx).apply_word(w);
                assert_eq!(fast.terms(), &brute_force(&ctx, w), "rank {rho}, word {w:?}");
            }
        }
    }

    #[test]
    fn tilde_constant_terms_match_direct_words() {
        let ctx = abstract_ctx(2);
        let v = vec_of(&ctx, &[(&[2, 1], "u"), (&[3], "w"), (&[1, 1, 1], "1")]);
        let table = v.tilde_constant_terms(4);
        for mu in super::super::partition::partitions_between(1, 4) {
            let direct = v.apply_tilde_word(&mu).constant_term();
            assert_eq!(table.get(&mu).cloned().unwrap_or_else(|| ctx.zero()), direct, "{mu}");
        }
    }
}
