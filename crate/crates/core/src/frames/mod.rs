//! Frame matrices, deformation vector fields and the canonical operators
//! that isolate the derivative in the top parameter.

mod fields;

pub use fields::VectorField;

use num_traits::Zero;
use thiserror::Error;

use crate::ring::linalg::{self, Matrix};
use crate::ring::RingError;
use crate::symbols::{Rank, RankKind, Symbols};
use crate::virasoro::eigen::general_eigenvalue;
use crate::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("rank parameter must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("canonical operator has a term of degree {degree} in the expansion variable (allowed 0..={max})")]
    DegreeOverflow { degree: i64, max: i64 },
    #[error("lowest coefficient of the canonical operator has the wrong shape: {0}")]
    LowestCoefficient(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn check_rank(sym: &Symbols) -> Result<usize, FrameError> {
    match sym.r() {
        r if r >= 2 => Ok(r),
        r => Err(FrameError::RankTooSmall(r)),
    }
}

fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Coefficients `a_0..a_{count-1}` of `1 / (c_r + c_{r-1} z + ... + c_1 z^{r-1})`.
pub fn series_inverse_coeffs(sym: &Symbols, count: usize) -> Vec<Poly> {
    let r = sym.r() as i64;
    let inv_top = sym.c(r).unit_inverse().expect("c_r is a unit");
    let mut a: Vec<Poly> = Vec::with_capacity(count);
    for p in 0..count {
        let acc = if p == 0 {
            sym.one()
        } else {
            let s = (0..p).fold(sym.zero(), |s, m| &s + &(&a[m] * &sym.c(r - (p - m) as i64)));
            -s
        };
        a.push(&acc * &inv_top);
    }
    a
}

/// Square matrix expressing the deformation fields in coordinate
/// derivatives; row `n` holds the components of the `n`-th field.
#[derive(Clone, Debug)]
pub struct FrameMatrix {
    pub rank: Rank,
    pub coords: Vec<usize>,
    pub entries: Matrix<Poly>,
    pub det: Poly,
    pub inverse: Matrix<Poly>,
}

impl FrameMatrix {
    fn assemble(sym: &Symbols, fields: &VectorFieldSet) -> Result<Self, FrameError> {
        let coords = fields.coords.clone();
        let entries: Matrix<Poly> = fields
            .fields
            .iter()
            .map(|f| coords.iter().map(|&k| f.component(k).cloned().unwrap_or_else(|| sym.zero())).collect())
            .collect();
        let det = linalg::determinant(&entries, &sym.one())?;
        let inverse = linalg::inverse(&entries, &sym.one())?;
        Ok(FrameMatrix { rank: sym.rank(), coords, entries, det, inverse })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Whether entry `(i, j)` (1-based) vanishes whenever `i + j > r + 1`.
    pub fn is_anti_triangular(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| i + j < n || self.entries[i][j].is_zero()))
    }

    /// Row `k` (1-based) of the inverse.
    pub fn inverse_row(&self, k: usize) -> &[Poly] {
        &self.inverse[k - 1]
    }
}

/// Deformation vector fields indexed `0..r-1` over a fixed coordinate list.
#[derive(Clone, Debug)]
pub struct VectorFieldSet {
    pub rank: Rank,
    pub coords: Vec<usize>,
    pub fields: Vec<VectorField>,
}

impl VectorFieldSet {
    /// Field `n`, or zero for `n >= r`.
    pub fn field(&self, n: usize) -> VectorField {
        self.fields.get(n).cloned().unwrap_or_else(VectorField::zero)
    }

    /// Every failing entry of the truncated bracket table
    /// `[V_m, V_n] = (n - m) V_{m+n}` with `V_N = 0` for `N >= r`.
    pub fn bracket_failures(&self) -> Vec<(usize, usize, VectorField)> {
        let r = self.fields.len();
        let mut out = Vec::new();
        for m in 0..r {
            for n in m + 1..r {
                let lhs = self.fields[m].bracket(&self.fields[n]);
                let rhs = self.field(m + n).scale_int(n as i64 - m as i64);
                let diff = lhs.add(&rhs.scale_int(-1));
                if !diff.is_zero() {
                    out.push((m, n, diff));
                }
            }
        }
        out
    }
}

/// `D_n = sum_{k=1}^{r-n} k c_{n+k} d/dc_k` for `n = 0..r-1`.
pub fn integer_fields(sym: &Symbols) -> Result<VectorFieldSet, FrameError> {
    let r = check_rank(sym)?;
    let fields = (0..r)
        .map(|n| VectorField::from_components((1..=r - n).map(|k| (sym.c_idx(k), sym.c((n + k) as i64).scale_int(k as i64)))))
        .collect();
    Ok(VectorFieldSet { rank: sym.rank(), coords: (1..=r).map(|k| sym.c_idx(k)).collect(), fields })
}

/// The integer-rank frame `M_{n+1,k} = k c_{n+k}` with its determinant and
/// inverse checked against their closed forms.
pub fn build_frame_integer(sym: &Symbols) -> Result<FrameMatrix, FrameError> {
    let r = check_rank(sym)?;
    let frame = FrameMatrix::assemble(sym, &integer_fields(sym)?)?;
    let sign = if (r * (r - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let fact: i64 = (1..=r as i64).product();
    let expected = sym.c(r as i64).pow(r as u32).scale_int(sign * fact);
    if frame.det != expected {
        return Err(FrameError::Inconsistent(format!("det M = {}, expected {expected}", frame.det)));
    }
    let a = series_inverse_coeffs(sym, r);
    let row = frame.inverse_row(r);
    for k in 0..r {
        if row[k] != a[k].scale(&rational(1, r as i64)) {
            return Err(FrameError::Inconsistent(format!("inverse row entry {} is {}", k + 1, row[k])));
        }
    }
    if row_times_matrix(sym, row, &frame.entries) != unit_row(sym, r, r) {
        return Err(FrameError::Inconsistent("last inverse row times M is not e_r".into()));
    }
    Ok(frame)
}

/// `row * m`.
pub fn row_times_matrix(sym: &Symbols, row: &[Poly], m: &Matrix<Poly>) -> Vec<Poly> {
    (0..m.len()).map(|j| row.iter().zip(m).fold(sym.zero(), |acc, (a, mrow)| &acc + &(a * &mrow[j]))).collect()
}

fn unit_row(sym: &Symbols, n: usize, k: usize) -> Vec<Poly> {
    (1..=n).map(|j| if j == k { sym.one() } else { sym.zero() }).collect()
}

/// Generators a canonical operator is expanded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorBasis {
    /// `D_0 = L_0 - Delta_{c0}`, `D_n = L_n - Lambda_n`.
    Shifted,
    /// Bare modes `L_m`.
    Modes,
}

/// `L* = sum_i t^i sum_m coeff[i][m] G_m` with `t` the expansion variable.
#[derive(Clone, Debug)]
pub struct CanonicalOperator {
    pub rank: Rank,
    pub basis: GeneratorBasis,
    pub coeff: Vec<Vec<Poly>>,
}

impl CanonicalOperator {
    /// Coefficient of `G_m` in the full operator, as a polynomial in `t`.
    pub fn total(&self, sym: &Symbols, m: usize) -> Poly {
        let t = sym.expansion();
        self.coeff.iter().rev().fold(sym.zero(), |acc, row| &(&acc * &t) + &row[m])
    }

    /// The operator with every generator `G_m` replaced by the vector
    /// field `fields[m]`.
    pub fn realize(&self, sym: &Symbols, fields: &VectorFieldSet) -> VectorField {
        (0..fields.fields.len())
            .fold(VectorField::zero(), |acc, m| acc.add(&fields.fields[m].scale(&self.total(sym, m))))
    }
}

/// Splits `t^r * row` by powers of the expansion variable.
fn expand_canonical(sym: &Symbols, row: &[Poly], basis: GeneratorBasis) -> Result<CanonicalOperator, FrameError> {
    let r = sym.r();
    let t = sym.expansion_idx();
    let scale = sym.expansion().pow(r as u32);
    let mut coeff = vec![vec![sym.zero(); r]; r];
    for (m, entry) in row.iter().enumerate() {
        for (deg, part) in (entry * &scale).split_by(t) {
            if deg < 0 || deg >= r as i64 {
                return Err(FrameError::DegreeOverflow { degree: deg, max: r as i64 - 1 });
            }
            coeff[deg as usize][m] = part;
        }
    }
    Ok(CanonicalOperator { rank: sym.rank(), basis, coeff })
}

/// `c_r^r sum_n (M^{-1})_{r,n+1} D_n`, with the lowest coefficient checked
/// against `((-1)^{r-1}/r) c_{r-1}^{r-1} D_{r-1}`.
pub fn build_lstar_integer(sym: &Symbols, frame: &FrameMatrix) -> Result<CanonicalOperator, FrameError> {
    let r = check_rank(sym)?;
    let op = expand_canonical(sym, frame.inverse_row(r), GeneratorBasis::Shifted)?;
    let sign = if r % 2 == 1 { 1 } else { -1 };
    let lead = sym.c(r as i64 - 1).pow(r as u32 - 1).scale(&rational(sign, r as i64));
    for (m, c) in op.coeff[0].iter().enumerate() {
        let expected = if m == r - 1 { lead.clone() } else { sym.zero() };
        if *c != expected {
            return Err(FrameError::LowestCoefficient(format!("coefficient of D_{m} is {c}, expected {expected}")));
        }
    }
    Ok(op)
}

/// `S_m = -sum_{a=1}^{r-1} c_a c_{m-a}` for `r <= m <= 2r-2`, `S_{2r-1} =
/// Lambda`, zero beyond.
pub fn half_scalar(sym: &Symbols, m: usize) -> Poly {
    let r = sym.r();
    if m == 2 * r - 1 {
        return sym.lambda();
    }
    if m > 2 * r - 1 {
        return sym.zero();
    }
    let c = |k: usize| if (1..r).contains(&k) { sym.c(k as i64) } else { sym.zero() };
    (1..r).filter(|&a| a < m).fold(sym.zero(), |acc, a| &acc - &(&c(a) * &c(m - a)))
}

/// The fields `V_0..V_{r-1}` on `(c_1..c_{r-1}, Lambda)`: `V_0` is the
/// weighted Euler field, the others solve `V_n(S_m) = (m - n) S_{m+n}`.
pub fn build_half_fields(sym: &Symbols) -> Result<VectorFieldSet, FrameError> {
    let r = check_rank(sym)?;
    let mut coords: Vec<usize> = (1..r).map(|k| sym.c_idx(k)).collect();
    coords.push(sym.lambda_idx());
    let top = sym.c(r as i64 - 1);
    let top_inv = top.unit_inverse().expect("c_{r-1} is a unit").scale(&rational(-1, 2));

    let jacobian: Matrix<Poly> =
        (1..r).map(|j| (1..r).map(|k| half_scalar(sym, r - 1 + j).derivative(sym.c_idx(k))).collect()).collect();
    let jac_det = linalg::determinant(&jacobian, &sym.one())?;
    if jac_det != top.scale_int(-2).pow(r as u32 - 1) {
        return Err(FrameError::Inconsistent(format!("coordinate Jacobian is {jac_det}")));
    }

    let mut fields = vec![VectorField::from_components(
        (1..r)
            .map(|k| (sym.c_idx(k), sym.c(k as i64).scale_int(k as i64)))
            .chain([(sym.lambda_idx(), sym.lambda().scale_int(2 * r as i64 - 1))]),
    )];
    for n in 1..r {
        let mut h = vec![sym.zero(); r - n + 1];
        for j in (1..=r - n).rev() {
            let mut rhs = half_scalar(sym, r - 1 + j + n).scale_int((r - 1 + j - n) as i64);
            for k in j + 1..=r - n {
                rhs = &rhs - &(&h[k] * &jacobian[j - 1][k - 1]);
            }
            h[j] = &rhs * &top_inv;
        }
        fields.push(VectorField::from_components((1..=r - n).map(|k| (sym.c_idx(k), h[k].clone()))));
    }
    let set = VectorFieldSet { rank: sym.rank(), coords, fields };
    for (n, m, lhs, rhs) in scalar_action_table(sym, &set) {
        if lhs != rhs {
            return Err(FrameError::Inconsistent(format!("V_{n}(S_{m}) = {lhs}, expected {rhs}")));
        }
    }
    Ok(set)
}

/// `(n, m, V_n(S_m), (m - n) S_{m+n})` for `0 <= n < r <= m <= 2r-1`.
pub fn scalar_action_table(sym: &Symbols, set: &VectorFieldSet) -> Vec<(usize, usize, Poly, Poly)> {
    let r = sym.r();
    let mut out = Vec::new();
    for n in 0..r {
        for m in r..2 * r {
            let lhs = set.fields[n].apply(&half_scalar(sym, m));
            let rhs = half_scalar(sym, m + n).scale_int(m as i64 - n as i64);
            out.push((n, m, lhs, rhs));
        }
    }
    out
}

/// `(-1)^{r(r-1)/2} (2r-1) prod_{n=1}^{r-1} (-(2r-2n-1)/2)`.
pub fn half_kappa(r: usize) -> Rational {
    let sign = if (r * (r - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    (1..r).fold(rational(sign * (2 * r as i64 - 1), 1), |acc, n| acc * rational(-(2 * (r - n) as i64 - 1), 2))
}

/// The half-rank frame assembled from [`build_half_fields`], checked for
/// anti-triangularity and the closed-form determinant.
pub fn build_frame_half(sym: &Symbols, fields: &VectorFieldSet) -> Result<FrameMatrix, FrameError> {
    let r = check_rank(sym)?;
    let frame = FrameMatrix::assemble(sym, fields)?;
    if !frame.is_anti_triangular() {
        return Err(FrameError::Inconsistent("half frame is not anti-triangular".into()));
    }
    let expected = &sym.lambda().pow(r as u32).scale(&half_kappa(r))
        * &sym.c(r as i64 - 1).pow(r as u32 - 1).unit_inverse().expect("unit");
    if frame.det != expected {
        return Err(FrameError::Inconsistent(format!("det = {}, expected {expected}", frame.det)));
    }
    Ok(frame)
}

/// `Lambda^r sum_m (frame^{-1})_{r,m+1} L_m` in the mode basis, with the
/// lowest coefficient checked to be a rational multiple of
/// `c_{r-1}^{2r-2} L_{r-1}`. Returns the operator and that multiple.
pub fn build_lstar_half(sym: &Symbols, frame: &FrameMatrix) -> Result<(CanonicalOperator, Rational), FrameError> {
    let r = check_rank(sym)?;
    let op = expand_canonical(sym, frame.inverse_row(r), GeneratorBasis::Modes)?;
    for row in &op.coeff {
        for c in row {
            if c.degree_range(sym.lambda_idx()).is_some_and(|(lo, _)| lo < 0) {
                return Err(FrameError::DegreeOverflow { degree: -1, max: r as i64 - 1 });
            }
        }
    }
    let shape = sym.c(r as i64 - 1).pow(2 * r as u32 - 2);
    let mut ratio = None;
    for (m, c) in op.coeff[0].iter().enumerate() {
        if m == r - 1 {
            ratio = c.exact_div(&shape).ok().and_then(|q| q.constant_value()).filter(|q| !q.is_zero());
        } else if !c.is_zero() {
            return Err(FrameError::LowestCoefficient(format!("coefficient of L_{m} is {c}")));
        }
    }
    let ratio = ratio.ok_or_else(|| FrameError::LowestCoefficient(format!("coefficient of L_{} is {}", r - 1, op.coeff[0][r - 1])))?;
    Ok((op, ratio))
}

/// Eigenvalue tables shared by the solvers and the gauge stage.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub rank: Rank,
    /// Target eigenvalues `Lambda_n`, `n = 1..=2r` (integer kind only).
    pub target: Vec<Poly>,
    /// Base eigenvalues `Lambda'_n`, `n = r-1..=2r-2`.
    pub base: Vec<Poly>,
    /// `S_m`, `m = r..=2r-1` (half kind only).
    pub scalars: Vec<Poly>,
    pub delta_c0: Poly,
    pub delta_c0p: Poly,
}

impl WeightTable {
    pub fn new(sym: &Symbols) -> Self {
        let r = sym.r();
        let (target, base, scalars) = match sym.rank().kind {
            RankKind::Integer => (
                (1..=2 * r as i64).map(|n| general_eigenvalue(sym, n, &sym.c0(), r)).collect(),
                (r as i64 - 1..=2 * r as i64 - 2).map(|n| general_eigenvalue(sym, n, &sym.c0p(), r - 1)).collect(),
                Vec::new(),
            ),
            RankKind::Half => (
                Vec::new(),
                (r as i64 - 1..=2 * r as i64 - 2).map(|n| crate::virasoro::eigen::half_base_eigenvalue(sym, n)).collect(),
                (r..2 * r).map(|m| half_scalar(sym, m)).collect(),
            ),
        };
        WeightTable {
            rank: sym.rank(),
            target,
            base,
            scalars,
            delta_c0: sym.conformal_weight(&sym.c0()),
            delta_c0p: sym.conformal_weight(&sym.c0p()),
        }
    }

    /// `Lambda_n` for `1 <= n <= 2r`, zero beyond.
    pub fn target_eigenvalue(&self, n: usize) -> Option<&Poly> {
        self.target.get(n.checked_sub(1)?)
    }
}

/// Checks `t^r d/dt` equals the canonical operator with generators replaced
/// by the vector fields.
pub fn realizes_top_derivative(sym: &Symbols, op: &CanonicalOperator, fields: &VectorFieldSet) -> bool {
    let lhs = op.realize(sym, fields);
    let rhs = VectorField::from_components([(sym.expansion_idx(), sym.expansion().pow(sym.r() as u32))]);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_int(r: usize) -> Symbols {
        Symbols::new(Rank::integer(r), 0)
    }

    fn sym_half(r: usize) -> Symbols {
        Symbols::new(Rank::half(r), 0)
    }

    #[test]
    fn inverse_series() {
        let s = sym_int(2);
        let a = series_inverse_coeffs(&s, 2);
        assert_eq!(a[0], s.parse("c2^(-1)").unwrap());
        assert_eq!(a[1], s.parse("-c1*c2^(-2)").unwrap());
        let s = sym_int(3);
        assert_eq!(series_inverse_coeffs(&s, 3)[2], s.parse("(c2^2 - c1*c3)*c3^(-3)").unwrap());
        let s = sym_int(4);
        let a = series_inverse_coeffs(&s, 5);
        for p in 0..5usize {
            let conv = (0..=p).fold(s.zero(), |acc, m| &acc + &(&a[m] * &s.c(4 - (p - m) as i64)));
            assert_eq!(conv, if p == 0 { s.one() } else { s.zero() });
        }
    }

    #[test]
    fn integer_frames() {
        let s = sym_int(2);
        let f = build_frame_integer(&s).unwrap();
        assert_eq!(f.entries, vec![vec![s.c(1), s.c(2).scale_int(2)], vec![s.c(2), s.zero()]]);
        assert_eq!(f.det, s.parse("-2*c2^2").unwrap());
        assert_eq!(build_frame_integer(&sym_int(3)).unwrap().det, sym_int(3).parse("-6*c3^3").unwrap());
        assert!(matches!(build_frame_integer(&sym_int(1)), Err(FrameError::RankTooSmall(1))));
    }

    #[test]
    fn integer_canonical() {
        let s = sym_int(2);
        let op = build_lstar_integer(&s, &build_frame_integer(&s).unwrap()).unwrap();
        assert_eq!(op.coeff[0], vec![s.zero(), s.parse("-c1/2").unwrap()]);
        assert_eq!(op.coeff[1], vec![s.parse("1/2").unwrap(), s.zero()]);
        let s = sym_int(3);
        let op = build_lstar_integer(&s, &build_frame_integer(&s).unwrap()).unwrap();
        assert_eq!(op.coeff[0][2], s.parse("c2^2/3").unwrap());
        for r in 2..=4 {
            let s = sym_int(r);
            let op = build_lstar_integer(&s, &build_frame_integer(&s).unwrap()).unwrap();
            assert!(realizes_top_derivative(&s, &op, &integer_fields(&s).unwrap()));
            assert!(integer_fields(&s).unwrap().bracket_failures().is_empty());
        }
    }

    #[test]
    fn half_fields() {
        let s = sym_half(2);
        let v = build_half_fields(&s).unwrap();
        assert_eq!(v.fields[1].component(s.c_idx(1)), Some(&s.parse("-Lambda/(2*c1)").unwrap()));
        let s = sym_half(3);
        let v = build_half_fields(&s).unwrap();
        let (c1, c2) = (s.c_idx(1), s.c_idx(2));
        assert_eq!(v.fields[1].component(c1), Some(&s.parse("c2 + 3*c1*Lambda/(2*c2^2)").unwrap()));
        assert_eq!(v.fields[1].component(c2), Some(&s.parse("-3*Lambda/(2*c2)").unwrap()));
        assert_eq!(v.fields[2].component(c1), Some(&s.parse("-Lambda/(2*c2)").unwrap()));
        assert!(v.fields[1].bracket(&v.fields[2]).is_zero());
        assert!(v.bracket_failures().is_empty());
    }

    #[test]
    fn half_frames() {
        let s = sym_half(2);
        let v = build_half_fields(&s).unwrap();
        let f = build_frame_half(&s, &v).unwrap();
        assert_eq!(f.entries[0], vec![s.c(1), s.parse("3*Lambda").unwrap()]);
        assert_eq!(f.det, s.parse("3*Lambda^2/(2*c1)").unwrap());
        let (op, rho) = build_lstar_half(&s, &f).unwrap();
        assert_eq!(rho, rational(2, 3));
        assert_eq!(op.total(&s, 0), s.parse("Lambda/3").unwrap());
        assert_eq!(op.total(&s, 1), s.parse("2*c1^2/3").unwrap());
        assert!(realizes_top_derivative(&s, &op, &v));
        for r in 3..=4 {
            let s = sym_half(r);
            let v = build_half_fields(&s).unwrap();
            let f = build_frame_half(&s, &v).unwrap();
            let (op, rho) = build_lstar_half(&s, &f).unwrap();
            assert!(!rho.is_zero());
            assert!(realizes_top_derivative(&s, &op, &v));
        }
    }

    #[test]
    fn weight_table() {
        let s = sym_int(2);
        let w = WeightTable::new(&s);
        assert_eq!(w.target[0], s.parse("(2*Q - c0)*c1").unwrap());
        assert_eq!(w.base[0], s.parse("(2*Q - c0p)*c1").unwrap());
        assert_eq!(w.base[1], s.parse("-c1^2").unwrap());
        let s = sym_half(2);
        let w = WeightTable::new(&s);
        assert_eq!(w.scalars, vec![s.parse("-c1^2").unwrap(), s.lambda()]);
        assert_eq!(w.base[0], s.parse("(2*Q - c0)*c1").unwrap());
    }
}
