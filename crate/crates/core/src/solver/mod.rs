//! Order-by-order construction of canonical irregular vectors.

mod rank1;
mod recursive;
mod verify;

pub use rank1::{solve_rank1, verma_context, Rank1Series};
pub use recursive::{solve, solve_half, solve_integer, SeriesSetup, SolverOptions};
pub use verify::{perturb, verify_canonical, Perturbation, RelationCheck, VerifyReport};

use std::sync::Arc;

use thiserror::Error;

use crate::frames::{CanonicalOperator, FrameError, WeightTable};
use crate::gram::GramError;
use crate::ring::RingError;
use crate::symbols::{Rank, Symbols};
use crate::virasoro::{ModuleContext, ModuleVector};
use crate::Poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("rank parameter must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("order {order}: constant-term equation is not affine in {unknown} alone: {equation}")]
    NonAffineElimination { order: usize, unknown: String, equation: String },
    #[error("order {order}: pivot for {unknown} is not a unit: {pivot}")]
    NonUnitPivot { order: usize, unknown: String, pivot: String },
    #[error("order {order}: residual does not vanish: {residual}")]
    ResidualNonZero { order: usize, residual: String },
    #[error("level {0}: Shapovalov block is singular")]
    SingularShapovalov(u32),
    #[error("cannot parse expression: {0}")]
    BadExpression(String),
    #[error("eigenvalue {0} is not divisible by the matching power of c1")]
    BadEigenvalue(String),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Solving state of one auxiliary unknown.
#[derive(Clone, Debug, PartialEq)]
pub enum UnknownStatus {
    Pending,
    Solved { order: usize, value: Poly },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnknownEntry {
    pub name: String,
    pub var: usize,
    pub status: UnknownStatus,
}

/// The unknowns `g_{r-1}, ..., g_1, nu, C_1, C_2, ...` in elimination order.
#[derive(Clone, Debug, PartialEq)]
pub struct UnknownLedger {
    pub entries: Vec<UnknownEntry>,
}

impl UnknownLedger {
    /// Every unknown of the roster, pending.
    pub fn new(sym: &Symbols) -> Self {
        let entries = sym
            .unknown_indices()
            .into_iter()
            .map(|var| UnknownEntry { name: sym.table().name(var).to_string(), var, status: UnknownStatus::Pending })
            .collect();
        UnknownLedger { entries }
    }

    /// Unknown pinned by the constant-term equation at `order`.
    pub fn scheduled(&self, order: usize) -> Option<&UnknownEntry> {
        self.entries.get(order)
    }

    pub fn pending_vars(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| e.status == UnknownStatus::Pending).map(|e| e.var).collect()
    }

    pub fn value(&self, var: usize) -> Option<&Poly> {
        self.entries.iter().find(|e| e.var == var).and_then(|e| match &e.status {
            UnknownStatus::Solved { value, .. } => Some(value),
            UnknownStatus::Pending => None,
        })
    }
}

/// Scalar gauge data attached after integration of the lower equations.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeExtension {
    /// Exact part of the potential.
    pub g0: Poly,
    /// Logarithmic exponents of `c_1..c_{r-1}`.
    pub log_exponents: Vec<Poly>,
}

/// `t^nu exp(sum_j g_j t^{-j}) sum_k t^k v_k` with `t` the expansion
/// variable and `v_k` in the rank-`(r-1)` base module.
#[derive(Clone, Debug)]
pub struct IrregularSeries {
    pub symbols: Symbols,
    pub base: Arc<ModuleContext<Poly>>,
    pub weights: WeightTable,
    pub lstar: CanonicalOperator,
    /// `g[j-1]` is `g_j`; pending entries hold the bare variable.
    pub g: Vec<Poly>,
    pub nu: Poly,
    pub tail: Vec<ModuleVector<Poly>>,
    pub ledger: UnknownLedger,
    pub gauge: Option<GaugeExtension>,
}

impl IrregularSeries {
    pub fn rank(&self) -> Rank {
        self.symbols.rank()
    }

    pub fn order(&self) -> usize {
        self.tail.len() - 1
    }

    /// `v_k`, zero for negative `k`.
    pub fn v(&self, k: i64) -> ModuleVector<Poly> {
        if k < 0 {
            ModuleVector::zero(&self.base)
        } else {
            self.tail[k as usize].clone()
        }
    }

    /// `g_j` for `1 <= j <= r-1`.
    pub fn g_j(&self, j: usize) -> &Poly {
        &self.g[j - 1]
    }
}

/// Applies the `m`-th generator of a canonical operator's basis.
pub(crate) fn apply_generator(series_sym: &Symbols, weights: &WeightTable, op: &CanonicalOperator, m: usize, v: &ModuleVector<Poly>) -> ModuleVector<Poly> {
    use crate::frames::GeneratorBasis;
    let moved = v.apply_mode(m as i64);
    match op.basis {
        GeneratorBasis::Modes => moved,
        GeneratorBasis::Shifted => {
            let s = if m == 0 {
                weights.delta_c0.clone()
            } else {
                weights.target_eigenvalue(m).cloned().unwrap_or_else(|| series_sym.zero())
            };
            moved.sub(&v.scale(&s))
        }
    }
}

/// `sum_m coeff[i][m] G_m v`.
pub(crate) fn apply_lstar_part(sym: &Symbols, weights: &WeightTable, op: &CanonicalOperator, i: usize, v: &ModuleVector<Poly>) -> ModuleVector<Poly> {
    let mut acc = ModuleVector::zero(v.context());
    if v.is_zero() {
        return acc;
    }
    for (m, c) in op.coeff[i].iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&apply_generator(sym, weights, op, m, v).scale(c));
        }
    }
    acc
}

/// Left side of the canonical-operator relation at order `k`:
/// `sum_i f_i v_{k-i} - (k - r + 1 + nu) v_{k-r+1} + sum_j j g_j v_{k-r+1+j}`.
pub(crate) fn lstar_residual(
    sym: &Symbols,
    weights: &WeightTable,
    op: &CanonicalOperator,
    nu: &Poly,
    g: &[Poly],
    v: &dyn Fn(i64) -> ModuleVector<Poly>,
    k: usize,
) -> ModuleVector<Poly> {
    let r = sym.r() as i64;
    let k = k as i64;
    let mut acc = ModuleVector::zero(&v(0).context().clone());
    for i in 0..r {
        acc = acc.add(&apply_lstar_part(sym, weights, op, i as usize, &v(k - i)));
    }
    let shift = &sym.int(k - r + 1) + nu;
    acc = acc.sub(&v(k - r + 1).scale(&shift));
    for j in 1..r {
        let w = v(k - r + 1 + j);
        if !w.is_zero() {
            acc = acc.add(&w.scale(&g[j as usize - 1].scale_int(j)));
        }
    }
    acc
}
