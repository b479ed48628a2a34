//! Fraction-free exact linear algebra over Laurent polynomial entries, plus a
//! dense modular kernel used to prescreen large recurrence-guessing systems.

use num_traits::Zero;
use thiserror::Error;

use crate::laurent::{mul_mod, pow_mod, LaurentPoly1, RationalFunc1};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular over the fraction field")]
    SingularMatrix,
    #[error("matrix and right-hand side have mismatched shapes")]
    ShapeMismatch,
}

/// Bareiss elimination to row echelon form. Returns (echelon matrix, pivot
/// columns). Row swaps only; every interior division is exact.
fn bareiss_echelon(mut m: Vec<Vec<LaurentPoly1>>) -> (Vec<Vec<LaurentPoly1>>, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = LaurentPoly1::one();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot = (row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].num_terms());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        for i in row + 1..rows {
            for j in col + 1..cols {
                let t = &(&m[row][col] * &m[i][j]) - &(&m[i][col] * &m[row][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][col] = LaurentPoly1::zero();
        }
        prev = m[row][col].clone();
        pivot_cols.push(col);
        row += 1;
    }
    (m, pivot_cols)
}

/// Solve the square system matrix · x = rhs exactly over the fraction field.
pub fn ff_solve(
    matrix: &[Vec<LaurentPoly1>],
    rhs: &[LaurentPoly1],
) -> Result<Vec<RationalFunc1>, LinalgError> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(LinalgError::ShapeMismatch);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let aug: Vec<Vec<LaurentPoly1>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (ech, pivots) = bareiss_echelon(aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return Err(LinalgError::SingularMatrix);
    }
    let mut x = vec![RationalFunc1::zero(); n];
    for i in (0..n).rev() {
        let mut acc = RationalFunc1::from_poly(ech[i][n].clone());
        for j in i + 1..n {
            acc = acc.sub(&x[j].mul(&RationalFunc1::from_poly(ech[i][j].clone())));
        }
        x[i] = acc
            .div(&RationalFunc1::from_poly(ech[i][i].clone()))
            .expect("pivot is nonzero")
            .reduce();
    }
    Ok(x)
}

/// Nullspace basis of a rectangular matrix over the fraction field, one basis
/// vector per free column. Each vector is cleared to a primitive polynomial
/// vector with minimal exponent 0 and positive-leading first nonzero entry.
pub fn ff_nullspace(matrix: &[Vec<LaurentPoly1>]) -> Vec<Vec<LaurentPoly1>> {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    if cols == 0 {
        return Vec::new();
    }
    if rows == 0 {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|i| {
                        if i == j {
                            LaurentPoly1::one()
                        } else {
                            LaurentPoly1::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    let (ech, pivots) = bareiss_echelon(matrix.to_vec());
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![RationalFunc1::zero(); cols];
        x[free] = RationalFunc1::from_poly(LaurentPoly1::one());
        for (prow, &pcol) in pivots.iter().enumerate().rev() {
            let mut acc = RationalFunc1::zero();
            for j in pcol + 1..cols {
                if !ech[prow][j].is_zero() {
                    acc = acc.sub(&x[j].mul(&RationalFunc1::from_poly(ech[prow][j].clone())));
                }
            }
            x[pcol] = acc
                .div(&RationalFunc1::from_poly(ech[prow][pcol].clone()))
                .expect("pivot is nonzero")
                .reduce();
        }
        basis.push(clear_vector(&x));
    }
    basis
}

/// Scale a rational vector to a primitive polynomial vector: common
/// denominator, shift so the minimal exponent over all entries is 0, divide
/// by the integer content, first nonzero entry gets a positive leading
/// coefficient.
fn clear_vector(v: &[RationalFunc1]) -> Vec<LaurentPoly1> {
    let mut den = LaurentPoly1::one();
    for r in v {
        let g = den.gcd_rational(r.den());
        den = &den * &r.den().div_exact(&g).expect("gcd divides");
    }
    let mut out: Vec<LaurentPoly1> = v
        .iter()
        .map(|r| {
            let cof = den.div_exact(r.den()).expect("lcm construction");
            &cof * r.num()
        })
        .collect();
    let mut content = num_bigint::BigInt::zero();
    let mut min_exp = i64::MAX;
    for p in &out {
        if !p.is_zero() {
            content = num_integer::Integer::gcd(&content, &p.content());
            min_exp = min_exp.min(p.min_exp().unwrap());
        }
    }
    if content.is_zero() {
        return out;
    }
    let first_neg = out.iter().find(|p| !p.is_zero()).map_or(false, |p| {
        num_traits::Signed::is_negative(&p.coeff(p.max_exp().unwrap()))
    });
    if first_neg {
        content = -content;
    }
    let content = LaurentPoly1::constant(content);
    for p in out.iter_mut() {
        *p = p
            .div_exact(&content)
            .expect("content divides")
            .shift(-min_exp);
    }
    out
}

/// Dense nullspace basis mod an odd prime (row-reduced, free variables set to
/// one). Used as a sound prescreen: any exact nullspace vector specializes to
/// a modular one, so an empty modular nullspace certifies an empty exact one.
pub(crate) fn mod_nullspace(mut m: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(r) = (row..rows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(row, r);
        let inv = pow_mod(m[row][col], p - 2, p);
        for j in col..cols {
            m[row][j] = mul_mod(m[row][j], inv, p);
        }
        for i in 0..rows {
            if i != row && m[i][col] != 0 {
                let f = m[i][col];
                for j in col..cols {
                    let s = mul_mod(f, m[row][j], p);
                    m[i][j] = (m[i][j] + p - s) % p;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for &(r, c) in &pivots {
            v[c] = (p - m[r][free] % p) % p;
        }
        basis.push(v);
    }
    basis
}
