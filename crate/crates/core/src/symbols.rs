//! The standard variable roster for rank-`r` computations.

use std::fmt;
use std::sync::Arc;

use crate::ring::{RingError, VarTable};
use crate::Poly;

/// Integer rank `r` or half-integer rank `r - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RankKind {
    Integer,
    Half,
}

/// A rank descriptor: the parameter `r` and whether the rank is `r` or
/// `r - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rank {
    pub r: usize,
    pub kind: RankKind,
}

impl Rank {
    pub fn integer(r: usize) -> Self {
        Rank { r, kind: RankKind::Integer }
    }

    pub fn half(r: usize) -> Self {
        Rank { r, kind: RankKind::Half }
    }

    /// Weight of the expansion variable (`c_r` or `Lambda`).
    pub fn expansion_weight(&self) -> i64 {
        match self.kind {
            RankKind::Integer => self.r as i64,
            RankKind::Half => 2 * self.r as i64 - 1,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RankKind::Integer => write!(f, "{}", self.r),
            RankKind::Half => write!(f, "{}/2", 2 * self.r - 1),
        }
    }
}

/// Variable table plus named accessors.
///
/// Roster: `Q, c0p, c0, c1..c_r, Lambda, Delta`, then the transient unknown
/// slots `g_{r-1}..g_1, nu, C1..C_order`. `c_k` has weight `k`, `Lambda`
/// weight `2r-1`, `g_j` weight `j` times the expansion weight; all other
/// variables weight zero.
#[derive(Clone, Debug)]
pub struct Symbols {
    table: Arc<VarTable>,
    rank: Rank,
    order: usize,
}

const Q: usize = 0;
const C0P: usize = 1;
const C0: usize = 2;
const C1: usize = 3;

impl Symbols {
    pub fn new(rank: Rank, order: usize) -> Self {
        let r = rank.r;
        let mut vars: Vec<(String, i64)> = vec![("Q".into(), 0), ("c0p".into(), 0), ("c0".into(), 0)];
        for k in 1..=r {
            vars.push((format!("c{k}"), k as i64));
        }
        vars.push(("Lambda".into(), 2 * r as i64 - 1));
        vars.push(("Delta".into(), 0));
        for j in (1..r).rev() {
            vars.push((format!("g{j}"), j as i64 * rank.expansion_weight()));
        }
        vars.push(("nu".into(), 0));
        for k in 1..=order {
            vars.push((format!("C{k}"), 0));
        }
        let table = VarTable::new(vars).expect("standard roster is well formed");
        Symbols { table, rank, order }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn r(&self) -> usize {
        self.rank.r
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn v(&self, i: usize) -> Poly {
        Poly::var_pow(&self.table, i, 1)
    }

    pub fn int(&self, n: i64) -> Poly {
        Poly::from_int(&self.table, n)
    }

    pub fn ratio(&self, num: i64, den: i64) -> Poly {
        Poly::from_ratio(&self.table, num, den)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(&self.table)
    }

    pub fn one(&self) -> Poly {
        Poly::one(&self.table)
    }

    pub fn q(&self) -> Poly {
        self.v(Q)
    }

    pub fn c0p(&self) -> Poly {
        self.v(C0P)
    }

    pub fn c0(&self) -> Poly {
        self.v(C0)
    }

    pub fn c0p_idx(&self) -> usize {
        C0P
    }

    pub fn c0_idx(&self) -> usize {
        C0
    }

    pub fn q_idx(&self) -> usize {
        Q
    }

    /// Index of `c_k`, `1 <= k <= r`.
    pub fn c_idx(&self, k: usize) -> usize {
        assert!((1..=self.r()).contains(&k), "c{k} outside roster");
        C1 + k - 1
    }

    /// `c_k`, or zero when `k` lies outside `1..=r`.
    pub fn c(&self, k: i64) -> Poly {
        if k >= 1 && k as usize <= self.r() {
            self.v(self.c_idx(k as usize))
        } else {
            self.zero()
        }
    }

    pub fn lambda_idx(&self) -> usize {
        C1 + self.r()
    }

    pub fn lambda(&self) -> Poly {
        self.v(self.lambda_idx())
    }

    pub fn delta_idx(&self) -> usize {
        C1 + self.r() + 1
    }

    pub fn delta(&self) -> Poly {
        self.v(self.delta_idx())
    }

    /// Index of the unknown `g_j`, `1 <= j <= r - 1`.
    pub fn g_idx(&self, j: usize) -> usize {
        assert!((1..self.r()).contains(&j), "g{j} outside roster");
        C1 + self.r() + 2 + (self.r() - 1 - j)
    }

    pub fn g(&self, j: usize) -> Poly {
        self.v(self.g_idx(j))
    }

    pub fn nu_idx(&self) -> usize {
        C1 + self.r() + 2 + (self.r() - 1)
    }

    pub fn nu(&self) -> Poly {
        self.v(self.nu_idx())
    }

    /// Index of the unknown constant term `C_k`, `1 <= k <= order`.
    pub fn big_c_idx(&self, k: usize) -> usize {
        assert!((1..=self.order).contains(&k), "C{k} outside roster");
        self.nu_idx() + k
    }

    /// `C_k`, with `C_0 = 1`.
    pub fn big_c(&self, k: usize) -> Poly {
        if k == 0 {
            self.one()
        } else {
            self.v(self.big_c_idx(k))
        }
    }

    /// Indices of every transient unknown slot.
    pub fn unknown_indices(&self) -> Vec<usize> {
        (C1 + self.r() + 2..=self.nu_idx() + self.order).collect()
    }

    /// Index of the expansion variable (`c_r` or `Lambda`).
    pub fn expansion_idx(&self) -> usize {
        match self.rank.kind {
            RankKind::Integer => self.c_idx(self.r()),
            RankKind::Half => self.lambda_idx(),
        }
    }

    pub fn expansion(&self) -> Poly {
        self.v(self.expansion_idx())
    }

    /// `1 + 6 Q^2`.
    pub fn default_central(&self) -> Poly {
        &self.one() + &(&self.q() * &self.q()).scale_int(6)
    }

    /// `x (Q - x)`, the conformal weight attached to a momentum `x`.
    pub fn conformal_weight(&self, x: &Poly) -> Poly {
        x * &(&self.q() - x)
    }

    pub fn parse(&self, src: &str) -> Result<Poly, crate::ring::ParseError> {
        Poly::parse(&self.table, src)
    }

    pub fn lookup(&self, name: &str) -> Result<usize, RingError> {
        self.table.require(name)
    }
}
