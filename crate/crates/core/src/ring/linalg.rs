//! Exact linear algebra over a [`Coefficient`] ring.

use std::collections::BTreeMap;

use super::coeff::Coefficient;
use super::RingError;

pub type Matrix<C> = Vec<Vec<C>>;

fn check_square<C>(m: &Matrix<C>) -> Result<usize, RingError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(RingError::DimensionMismatch);
    }
    Ok(n)
}

/// Fraction-free (Bareiss) elimination. Returns the determinant.
///
/// Every division performed is exact by Sylvester's identity, so the
/// computation stays inside the coefficient ring.
pub fn determinant<C: Coefficient>(m: &Matrix<C>, one: &C) -> Result<C, RingError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(one.clone());
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = one.clone();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = !sign;
                }
                None => return Ok(one.zero_like()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign { d.neg() } else { d })
}

/// Inverse by the adjugate formula with Bareiss minors.
///
/// Fails with `NotDivisible` when an adjugate entry is not divisible by the
/// determinant, and with `Singular` when the determinant vanishes.
pub fn inverse<C: Coefficient>(m: &Matrix<C>, one: &C) -> Result<Matrix<C>, RingError> {
    let n = check_square(m)?;
    let det = determinant(m, one)?;
    if det.is_zero() {
        return Err(RingError::Singular);
    }
    let mut inv = vec![vec![one.zero_like(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Matrix<C> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let mut cof = determinant(&minor, one)?;
            if (i + j) % 2 == 1 {
                cof = cof.neg();
            }
            inv[j][i] = cof.exact_div(&det)?;
        }
    }
    Ok(inv)
}

/// Solves `m x = b` for square nonsingular `m`.
///
/// Sparse Gauss-Jordan elimination that only pivots on ring units, picking
/// pivots with the fewest column entries first. Whatever cannot be pivoted
/// that way is handed to fraction-free elimination with a final exact
/// division by the determinant of the remaining block.
pub fn solve<C: Coefficient>(m: &Matrix<C>, b: &[C], one: &C) -> Result<Vec<C>, RingError> {
    let n = check_square(m)?;
    if b.len() != n {
        return Err(RingError::DimensionMismatch);
    }
    let zero = one.zero_like();
    let mut rows: Vec<BTreeMap<usize, C>> = m
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect())
        .collect();
    let mut rhs: Vec<C> = b.to_vec();
    let mut active_rows: Vec<bool> = vec![true; n];
    let mut active_cols: Vec<bool> = vec![true; n];
    // pivot row for each eliminated column
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    loop {
        let mut col_count = vec![0usize; n];
        for (i, row) in rows.iter().enumerate() {
            if active_rows[i] {
                for &j in row.keys() {
                    col_count[j] += 1;
                }
            }
        }
        let mut best: Option<(usize, usize, usize, C)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !active_rows[i] {
                continue;
            }
            for (&j, x) in row {
                if !active_cols[j] {
                    continue;
                }
                let cost = (col_count[j] - 1) * (row.len() - 1);
                if best.as_ref().is_some_and(|bst| bst.2 <= cost) {
                    continue;
                }
                if let Some(inv) = x.invert() {
                    best = Some((i, j, cost, inv));
                }
            }
        }
        let Some((pi, pj, _, inv)) = best else { break };
        let prow: BTreeMap<usize, C> = rows[pi].iter().map(|(&j, x)| (j, x.mul(&inv))).collect();
        let prhs = rhs[pi].mul(&inv);
        rows[pi] = prow.clone();
        rhs[pi] = prhs.clone();
        for i in 0..n {
            if i == pi {
                continue;
            }
            let Some(factor) = rows[i].get(&pj).cloned() else { continue };
            for (&j, x) in &prow {
                let updated = rows[i].get(&j).cloned().unwrap_or_else(|| zero.clone()).sub(&factor.mul(x));
                if updated.is_zero() {
                    rows[i].remove(&j);
                } else {
                    rows[i].insert(j, updated);
                }
            }
            rhs[i] = rhs[i].sub(&factor.mul(&prhs));
        }
        active_rows[pi] = false;
        active_cols[pj] = false;
        pivots.push((pi, pj));
    }

    let rest_rows: Vec<usize> = (0..n).filter(|&i| active_rows[i]).collect();
    let rest_cols: Vec<usize> = (0..n).filter(|&j| active_cols[j]).collect();
    let mut x = vec![zero.clone(); n];
    if !rest_rows.is_empty() {
        // entries of these rows in eliminated columns are already zero
        let sub: Matrix<C> = rest_rows
            .iter()
            .map(|&i| rest_cols.iter().map(|j| rows[i].get(j).cloned().unwrap_or_else(|| zero.clone())).collect())
            .collect();
        let sub_b: Vec<C> = rest_rows.iter().map(|&i| rhs[i].clone()).collect();
        let y = solve_fraction_free(&sub, &sub_b, one)?;
        for (k, &j) in rest_cols.iter().enumerate() {
            x[j] = y[k].clone();
        }
    }
    for &(pi, pj) in &pivots {
        let mut v = rhs[pi].clone();
        for (&j, a) in &rows[pi] {
            if j != pj {
                v = v.sub(&a.mul(&x[j]));
            }
        }
        x[pj] = v;
    }
    Ok(x)
}

/// Bareiss forward elimination on the augmented matrix, then
/// fraction-free back substitution of `det * x` and a final exact
/// division by `det`.
pub fn solve_fraction_free<C: Coefficient>(m: &Matrix<C>, b: &[C], one: &C) -> Result<Vec<C>, RingError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Matrix<C> = m.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let mut prev = one.clone();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                }
                None => return Err(RingError::Singular),
            }
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.exact_div(&prev)?;
            }
            a[i][k] = one.zero_like();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    // y = det * x, computed row by row from the bottom
    let mut y = vec![one.zero_like(); n];
    for i in (0..n).rev() {
        let mut acc = det.mul(&a[i][n]);
        for j in i + 1..n {
            acc = acc.sub(&a[i][j].mul(&y[j]));
        }
        y[i] = acc.exact_div(&a[i][i])?;
    }
    y.into_iter().map(|v| v.exact_div(&det)).collect()
}
