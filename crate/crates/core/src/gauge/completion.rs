use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::frames::{self, VectorField};
use crate::ring::Exponents;
use crate::symbols::{RankKind, Symbols};
use crate::{Poly, Rational};

use super::GaugeError;

/// Scalar parts `sigma_0..sigma_{r-1}` completing the half-rank fields to
/// a representation of the truncated Virasoro algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCompletion {
    pub bound: i64,
    pub sigma: Vec<Poly>,
    /// `(i, j, V_i s_j - V_j s_i - (j-i) s_{i+j})` with `s_N = S_N` for
    /// `N >= r`; every entry is zero.
    pub maurer_cartan: Vec<(usize, usize, Poly)>,
    /// `sum_i (frame^{-1})_{r,i+1} sigma_i`; zero.
    pub gauge_residual: Poly,
    /// Size of the monomial ansatz.
    pub ansatz_size: usize,
}

/// Exponent vectors over `c_1..c_{r-1}, Lambda` of total weight `n`, with
/// the exponents of `c_{r-1}` and `Lambda` bounded below by `-bound`.
fn weighted_monomials(r: usize, n: i64, bound: i64) -> Vec<Vec<i64>> {
    let top_w = r as i64 - 1;
    let lam_w = 2 * r as i64 - 1;
    let mut out = Vec::new();
    let lam_max = (n + top_w * bound).div_euclid(lam_w);
    for e_lam in -bound..=lam_max {
        let after_lam = n - lam_w * e_lam;
        let top_max = after_lam.div_euclid(top_w);
        for e_top in -bound..=top_max {
            let rem = after_lam - top_w * e_top;
            if rem < 0 {
                continue;
            }
            let mut lower = Vec::new();
            compositions(rem, r - 2, &mut vec![0; r - 2], &mut lower);
            for mut exps in lower {
                exps.push(e_top);
                exps.push(e_lam);
                out.push(exps);
            }
        }
    }
    out
}

/// Exponents `e_1..e_m >= 0` with `sum k e_k = rem`.
fn compositions(rem: i64, m: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    fn rec(rem: i64, k: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=rem / k as i64 {
            cur[k - 1] = e;
            rec(rem - e * k as i64, k - 1, cur, out);
        }
        cur[k - 1] = 0;
    }
    rec(rem, m, cur, out);
}

type Row = BTreeMap<usize, Rational>;

/// Incremental row echelon form over the rationals.
#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, (Row, Rational)>,
}

impl Echelon {
    /// Adds `row . x = rhs`; false when it contradicts the rows so far.
    fn push(&mut self, mut row: Row, mut rhs: Rational) -> bool {
        while let Some((&lead, coef)) = row.iter().next() {
            let coef = coef.clone();
            match self.pivots.get(&lead) {
                Some((prow, prhs)) => {
                    for (col, v) in prow {
                        let e = row.entry(*col).or_insert_with(Rational::zero);
                        *e -= &coef * v;
                        if e.is_zero() {
                            row.remove(col);
                        }
                    }
                    rhs -= &coef * prhs;
                }
                None => {
                    let inv = Rational::one() / &coef;
                    let row: Row = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
                    self.pivots.insert(lead, (row, rhs * inv));
                    return true;
                }
            }
        }
        rhs.is_zero()
    }

    /// Solution with every free column set to zero.
    fn basic_solution(&self, cols: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); cols];
        for (&lead, (row, rhs)) in self.pivots.iter().rev() {
            let mut v = rhs.clone();
            for (col, c) in row.range(lead + 1..) {
                v -= c * &x[*col];
            }
            x[lead] = v;
        }
        x
    }
}

fn exps_to_poly(sym: &Symbols, coords: &[usize], exps: &[i64]) -> Poly {
    let mut e: Exponents = vec![0; sym.table().len()].into();
    for (&v, &x) in coords.iter().zip(exps) {
        e[v] = x as i16;
    }
    Poly::monomial(sym.table(), Rational::one(), e)
}

fn collect_into(rows: &mut BTreeMap<(usize, Exponents), Row>, eq: usize, col: usize, p: &Poly) {
    for (exps, c) in p.terms() {
        let e = rows.entry((eq, exps.clone())).or_default().entry(col).or_insert_with(Rational::zero);
        *e += c;
    }
}

/// Solves the scalar completion problem with a quasi-homogeneous Laurent
/// ansatz whose exponents of `c_{r-1}` and `Lambda` are at least `-bound`.
///
/// Among the solutions of the linear system, the one with every free
/// unknown zero is returned.
pub fn scalar_completion_half(sym: &Symbols, bound: i64) -> Result<ScalarCompletion, GaugeError> {
    if sym.rank().kind != RankKind::Half {
        return Err(GaugeError::Frame(frames::FrameError::Inconsistent("scalar completion needs half-integer rank".into())));
    }
    let r = sym.r();
    let set = frames::build_half_fields(sym)?;
    let frame = frames::build_frame_half(sym, &set)?;
    let fields: &[VectorField] = &set.fields;

    let mut unknowns: Vec<(usize, Poly)> = Vec::new();
    for n in 0..r {
        for exps in weighted_monomials(r, n as i64, bound) {
            unknowns.push((n, exps_to_poly(sym, &set.coords, &exps)));
        }
    }

    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let gauge_eq = pairs.len();
    let gauge_row = frame.inverse_row(r);
    let mut rows: BTreeMap<(usize, Exponents), Row> = BTreeMap::new();
    for (col, (n, m)) in unknowns.iter().enumerate() {
        for (eq, &(i, j)) in pairs.iter().enumerate() {
            let mut image = sym.zero();
            if *n == j {
                image = &image + &fields[i].apply(m);
            }
            if *n == i {
                image = &image - &fields[j].apply(m);
            }
            if *n == i + j {
                image = &image - &m.scale_int((j - i) as i64);
            }
            collect_into(&mut rows, eq, col, &image);
        }
        collect_into(&mut rows, gauge_eq, col, &(&gauge_row[*n] * m));
    }
    let mut rhs: BTreeMap<(usize, Exponents), Rational> = BTreeMap::new();
    for (eq, &(i, j)) in pairs.iter().enumerate() {
        if i + j >= r {
            let s = frames::half_scalar(sym, i + j).scale_int((j - i) as i64);
            for (exps, c) in s.terms() {
                *rhs.entry((eq, exps.clone())).or_insert_with(Rational::zero) += c;
            }
        }
    }

    let mut echelon = Echelon::default();
    let mut keys: Vec<(usize, Exponents)> = rows.keys().cloned().collect();
    keys.extend(rhs.keys().filter(|k| !rows.contains_key(k)).cloned());
    for key in keys {
        let row: Row = rows.remove(&key).unwrap_or_default().into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let b = rhs.remove(&key).unwrap_or_else(Rational::zero);
        if !echelon.push(row, b) {
            return Err(GaugeError::Infeasible { bound });
        }
    }
    let x = echelon.basic_solution(unknowns.len());
    let mut sigma = vec![sym.zero(); r];
    for ((n, m), coef) in unknowns.iter().zip(&x) {
        if !coef.is_zero() {
            sigma[*n] = &sigma[*n] + &m.scale(coef);
        }
    }

    let completion = certify(sym, fields, gauge_row, sigma, bound, unknowns.len());
    if completion.maurer_cartan.iter().any(|(_, _, p)| !p.is_zero()) || !completion.gauge_residual.is_zero() {
        return Err(GaugeError::Frame(frames::FrameError::Inconsistent("scalar completion residual".into())));
    }
    Ok(completion)
}

fn certify(sym: &Symbols, fields: &[VectorField], gauge_row: &[Poly], sigma: Vec<Poly>, bound: i64, ansatz_size: usize) -> ScalarCompletion {
    let r = sym.r();
    let full = |n: usize| if n < r { sigma[n].clone() } else { frames::half_scalar(sym, n) };
    let mut maurer_cartan = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let lhs = &fields[i].apply(&sigma[j]) - &fields[j].apply(&sigma[i]);
            maurer_cartan.push((i, j, &lhs - &full(i + j).scale_int((j - i) as i64)));
        }
    }
    let gauge_residual = gauge_row.iter().zip(&sigma).fold(sym.zero(), |acc, (a, s)| &acc + &(a * s));
    ScalarCompletion { bound, sigma, maurer_cartan, gauge_residual, ansatz_size }
}
