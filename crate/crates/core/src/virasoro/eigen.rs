//! Eigenvalue tables for the cyclic vectors used by the solvers.

use std::sync::Arc;

use crate::symbols::Symbols;
use crate::Poly;

use super::module::ModuleContext;

/// Which closed form supplies the low-rank eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// `((n+1)Q - c0) c_n - sum c_k c_{n-k}` for every rank.
    #[default]
    General,
    /// The explicit rank-one and rank-two displays:
    /// `2(Q - c0) c1, -c1^2` and `-c1^2 + c2(3Q - 2c0), -2 c1 c2, -c2^2`.
    Section2Display,
}

/// `((n+1)Q - x) c_n - sum_{k=1}^{n-1} c_k c_{n-k}` with `c_j = 0` for
/// `j > top`.
pub fn general_eigenvalue(sym: &Symbols, n: i64, x: &Poly, top: usize) -> Poly {
    let c = |k: i64| if k >= 1 && k as usize <= top { sym.c(k) } else { sym.zero() };
    let lead = &(&sym.q().scale_int(n + 1) - x) * &c(n);
    (1..n).fold(lead, |acc, k| &acc - &(&c(k) * &c(n - k)))
}

/// Half-rank base eigenvalue:
/// `delta_{n,r-1} ((n+1)Q - c0) c_{r-1} - sum_{p+q=n, 1<=p,q<=r-1} c_p c_q`.
pub fn half_base_eigenvalue(sym: &Symbols, n: i64) -> Poly {
    let top = sym.r() as i64 - 1;
    let mut acc = if n == top { &(&sym.q().scale_int(n + 1) - &sym.c0()) * &sym.c(top) } else { sym.zero() };
    for p in 1..=top {
        let q = n - p;
        if (1..=top).contains(&q) {
            acc = &acc - &(&sym.c(p) * &sym.c(q));
        }
    }
    acc
}

/// Display eigenvalues for the rank-`rho` cyclic vector with momentum `x`
/// (`rho` must be 1 or 2).
pub fn display_eigenvalues(sym: &Symbols, rho: usize, x: &Poly) -> Option<Vec<Poly>> {
    let q = sym.q();
    match rho {
        1 => Some(vec![
            (&(&q - x) * &sym.c(1)).scale_int(2),
            -(&sym.c(1) * &sym.c(1)),
        ]),
        2 => Some(vec![
            &(&sym.c(2) * &(&q.scale_int(3) - &x.scale_int(2))) - &(&sym.c(1) * &sym.c(1)),
            (&sym.c(1) * &sym.c(2)).scale_int(-2),
            -(&sym.c(2) * &sym.c(2)),
        ]),
        _ => None,
    }
}

/// Eigenvalues `rho..=2 rho` of a rank-`rho` cyclic vector with momentum
/// `x` built from `c_1..c_rho`.
pub fn integer_eigenvalues(sym: &Symbols, rho: usize, x: &Poly, convention: Convention) -> Option<Vec<Poly>> {
    match convention {
        Convention::General => {
            Some((rho..=2 * rho).map(|n| general_eigenvalue(sym, n as i64, x, rho)).collect())
        }
        Convention::Section2Display => display_eigenvalues(sym, rho, x),
    }
}

/// Base module for the integer-rank construction: rank `r-1`, momentum
/// `c0p`.
pub fn integer_base_context(sym: &Symbols, central: &Poly) -> Arc<ModuleContext<Poly>> {
    let rho = sym.r() - 1;
    let eigen = integer_eigenvalues(sym, rho, &sym.c0p(), Convention::General).expect("general table");
    ModuleContext::new(rho, eigen, central.clone())
}

/// Base module for the half-rank construction: rank `r-1`, momentum `c0`.
pub fn half_base_context(sym: &Symbols, central: &Poly) -> Arc<ModuleContext<Poly>> {
    let rho = sym.r() - 1;
    let eigen = (rho..=2 * rho).map(|n| half_base_eigenvalue(sym, n as i64)).collect();
    ModuleContext::new(rho, eigen, central.clone())
}
