use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::frames::VectorField;
use crate::ring::linalg;
use crate::symbols::Symbols;
use crate::virasoro::{ModuleContext, ModuleVector, Partition};
use crate::Poly;

/// `sum_n t^n u_n` with module-vector coefficients free of `t`, known
/// through order `high`.
#[derive(Clone, Debug)]
pub struct ModuleSeries {
    pub ctx: Arc<ModuleContext<Poly>>,
    pub orders: BTreeMap<i64, ModuleVector<Poly>>,
    pub high: i64,
}

impl ModuleSeries {
    pub fn new(ctx: &Arc<ModuleContext<Poly>>, high: i64) -> Self {
        ModuleSeries { ctx: ctx.clone(), orders: BTreeMap::new(), high }
    }

    pub fn from_tail(ctx: &Arc<ModuleContext<Poly>>, tail: &[ModuleVector<Poly>]) -> Self {
        let mut s = Self::new(ctx, tail.len() as i64 - 1);
        for (k, v) in tail.iter().enumerate() {
            s.accumulate(k as i64, v.clone());
        }
        s
    }

    pub fn get(&self, n: i64) -> ModuleVector<Poly> {
        self.orders.get(&n).cloned().unwrap_or_else(|| ModuleVector::zero(&self.ctx))
    }

    /// Adds `u` at order `n` (ignored beyond `high`).
    pub fn accumulate(&mut self, n: i64, u: ModuleVector<Poly>) {
        if n > self.high || u.is_zero() {
            return;
        }
        let sum = match self.orders.remove(&n) {
            Some(old) => old.add(&u),
            None => u,
        };
        if !sum.is_zero() {
            self.orders.insert(n, sum);
        }
    }

    pub fn truncate(mut self, high: i64) -> Self {
        self.high = self.high.min(high);
        let h = self.high;
        self.orders.retain(|&n, _| n <= h);
        self
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = Self::new(&self.ctx, self.high.min(other.high));
        for (&n, u) in &self.orders {
            out.accumulate(n, u.clone());
        }
        for (&n, u) in &other.orders {
            out.accumulate(n, u.neg());
        }
        out
    }

    /// Product with a Laurent polynomial that may contain `t`.
    pub fn mul_poly(&self, p: &Poly, t: usize) -> Self {
        let parts = p.split_by(t);
        let low = parts.first().map_or(0, |(d, _)| *d);
        let mut out = Self::new(&self.ctx, self.high + low.min(0));
        for (&n, u) in &self.orders {
            for (d, c) in &parts {
                out.accumulate(n + d, u.scale(c));
            }
        }
        out
    }

    /// Constant terms as a Laurent polynomial in `t`.
    pub fn constant_terms(&self, sym: &Symbols, t: usize) -> Poly {
        self.orders.iter().fold(sym.zero(), |acc, (&n, u)| &acc + &(&u.constant_term() * &Poly::var_pow(sym.table(), t, n)))
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn lowest(&self) -> Option<i64> {
        self.orders.keys().next().copied()
    }
}

/// Derivatives of the base cyclic vector in the lower parameters, from its
/// own lower equations: `d/dc_k v_0 = sum_j (M'^{-1})_{k,j+1} (L_j - s'_j) v_0`.
pub struct BaseDerivatives {
    ctx: Arc<ModuleContext<Poly>>,
    /// Variable index of `c_k` paired with `d/dc_k v_0`.
    cyclic: Vec<(usize, ModuleVector<Poly>)>,
    cache: HashMap<(usize, Partition), ModuleVector<Poly>>,
}

impl BaseDerivatives {
    /// `scalars[j]` is `s'_j`, `j = 0..rho-1`, for the base of rank `rho`.
    pub fn new(sym: &Symbols, ctx: &Arc<ModuleContext<Poly>>, scalars: &[Poly]) -> Self {
        let rho = ctx.rank();
        let frame: linalg::Matrix<Poly> = (0..rho)
            .map(|j| (1..=rho).map(|k| if j + k <= rho { sym.c((j + k) as i64).scale_int(k as i64) } else { sym.zero() }).collect())
            .collect();
        let inv = linalg::inverse(&frame, &sym.one()).expect("base frame is invertible");
        let shifted: Vec<ModuleVector<Poly>> = (0..rho)
            .map(|j| {
                let v0 = ModuleVector::cyclic(ctx);
                v0.apply_mode(j as i64).sub(&v0.scale(&scalars[j]))
            })
            .collect();
        let cyclic = (1..=rho)
            .map(|k| {
                let d = (0..rho).fold(ModuleVector::zero(ctx), |acc, j| acc.add(&shifted[j].scale(&inv[k - 1][j])));
                (sym.c_idx(k), d)
            })
            .collect();
        BaseDerivatives { ctx: ctx.clone(), cyclic, cache: HashMap::new() }
    }

    /// `d/dx` of `u`, differentiating both coefficients and basis vectors.
    pub fn derivative(&mut self, u: &ModuleVector<Poly>, x: usize) -> ModuleVector<Poly> {
        let mut out = u.map_coeffs(|c| c.derivative(x));
        let Some(slot) = self.cyclic.iter().position(|(v, _)| *v == x) else {
            return out;
        };
        for (lambda, c) in u.terms() {
            let key = (slot, lambda.clone());
            let moved = match self.cache.get(&key) {
                Some(hit) => hit.clone(),
                None => {
                    let rank = self.ctx.rank() as i64;
                    let modes: Vec<i64> = lambda.parts().iter().map(|&p| rank - p as i64).collect();
                    let w = self.cyclic[slot].1.apply_word(&modes);
                    self.cache.insert(key, w.clone());
                    w
                }
            };
            out = out.add(&moved.scale(c));
        }
        out
    }
}

/// `F(S)` for a vector field `F` whose `t`-component acts on the explicit
/// powers of `t` and whose other components act on coefficients and basis
/// vectors.
pub fn apply_field(field: &VectorField, s: &ModuleSeries, t: usize, base: &mut BaseDerivatives) -> ModuleSeries {
    let mut high = s.high;
    let mut pieces: Vec<(i64, ModuleVector<Poly>)> = Vec::new();
    for (&x, coef) in field.components() {
        let parts = coef.split_by(t);
        let shift = if x == t { -1 } else { 0 };
        if let Some((low, _)) = parts.first() {
            high = high.min(s.high + low + shift);
        }
        for (&k, u) in &s.orders {
            let du = if x == t { u.scale_int(k) } else { base.derivative(u, x) };
            if du.is_zero() {
                continue;
            }
            for (d, c) in &parts {
                pieces.push((k + d + shift, du.scale(c)));
            }
        }
    }
    let mut out = ModuleSeries::new(&s.ctx, high);
    for (n, u) in pieces {
        out.accumulate(n, u);
    }
    out
}
