//! Dense half-lattice polynomial kernel. Every polynomial in the hot paths
//! (colored Jones values, operator coefficients specialized at M = t^{2n})
//! has exponents of a single parity, so coefficients live on the lattice
//! off + 2i. Arithmetic is checked i128; any overflow reports back so the
//! caller can fall back to exact BigInt arithmetic.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::laurent::LaurentPoly1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum DenseErr {
    Overflow,
    NotDivisible,
}

/// Coefficient vector on the exponent lattice off + 2i.
#[derive(Clone, Debug, Default)]
pub(crate) struct DensePoly {
    pub off: i64,
    pub c: Vec<i128>,
}

impl DensePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Drop zero margins; canonicalizes the zero polynomial to an empty vec.
    pub fn trim(mut self) -> Self {
        let Some(first) = self.c.iter().position(|&x| x != 0) else {
            return Self::zero();
        };
        let last = self.c.iter().rposition(|&x| x != 0).unwrap();
        self.c.drain(..first);
        self.c.truncate(last - first + 1);
        self.off += 2 * first as i64;
        self
    }

    pub fn from_parts(off: i64, c: Vec<i128>) -> Self {
        Self { off, c }.trim()
    }

    /// None when exponents mix parity or a coefficient exceeds i128.
    pub fn from_poly(p: &LaurentPoly1) -> Option<Self> {
        let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else {
            return Some(Self::zero());
        };
        if (hi - lo) % 2 != 0 {
            return None;
        }
        let len = ((hi - lo) / 2 + 1) as usize;
        let mut c = vec![0i128; len];
        for (e, k) in p.iter() {
            if (e - lo) % 2 != 0 {
                return None;
            }
            c[((e - lo) / 2) as usize] = k.to_i128()?;
        }
        Some(Self { off: lo, c })
    }

    pub fn to_poly(&self) -> LaurentPoly1 {
        LaurentPoly1::from_terms(
            self.c
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| (self.off + 2 * i as i64, BigInt::from(k))),
        )
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            off: self.off + k,
            c: self.c.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, DenseErr> {
        if rhs.c.is_empty() {
            return Ok(self.clone());
        }
        if self.c.is_empty() {
            return Ok(rhs.clone());
        }
        if (self.off - rhs.off) % 2 != 0 {
            return Err(DenseErr::Overflow);
        }
        let off = self.off.min(rhs.off);
        let hi =
            (self.off + 2 * (self.c.len() as i64 - 1)).max(rhs.off + 2 * (rhs.c.len() as i64 - 1));
        let len = ((hi - off) / 2 + 1) as usize;
        let mut c = vec![0i128; len];
        let a0 = ((self.off - off) / 2) as usize;
        for (i, &x) in self.c.iter().enumerate() {
            c[a0 + i] = x;
        }
        let b0 = ((rhs.off - off) / 2) as usize;
        for (i, &x) in rhs.c.iter().enumerate() {
            c[b0 + i] = c[b0 + i].checked_add(x).ok_or(DenseErr::Overflow)?;
        }
        Ok(Self { off, c }.trim())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, DenseErr> {
        if rhs.c.is_empty() {
            return Ok(self.clone());
        }
        if self.c.is_empty() {
            let mut out = rhs.clone();
            for x in out.c.iter_mut() {
                *x = x.checked_neg().ok_or(DenseErr::Overflow)?;
            }
            return Ok(out);
        }
        if (self.off - rhs.off) % 2 != 0 {
            return Err(DenseErr::Overflow);
        }
        let off = self.off.min(rhs.off);
        let hi =
            (self.off + 2 * (self.c.len() as i64 - 1)).max(rhs.off + 2 * (rhs.c.len() as i64 - 1));
        let len = ((hi - off) / 2 + 1) as usize;
        let mut c = vec![0i128; len];
        let a0 = ((self.off - off) / 2) as usize;
        for (i, &x) in self.c.iter().enumerate() {
            c[a0 + i] = x;
        }
        let b0 = ((rhs.off - off) / 2) as usize;
        for (i, &x) in rhs.c.iter().enumerate() {
            c[b0 + i] = c[b0 + i].checked_sub(x).ok_or(DenseErr::Overflow)?;
        }
        Ok(Self { off, c }.trim())
    }

    /// Exact quotient by t^{2k} - 1 (k lattice slots).
    pub fn div_unity(&self, k: usize) -> Result<Self, DenseErr> {
        if self.c.is_empty() {
            return Ok(Self::zero());
        }
        let n = self.c.len();
        if n < k {
            return Err(DenseErr::NotDivisible);
        }
        let mut q = vec![0i128; n - k];
        for j in (0..n - k).rev() {
            let carry = if j + k < n - k { q[j + k] } else { 0 };
            q[j] = self.c[j + k].checked_add(carry).ok_or(DenseErr::Overflow)?;
        }
        for i in 0..k.min(n) {
            let neg_q = if i < n - k { -q[i] } else { 0 };
            if self.c[i] != neg_q {
                return Err(DenseErr::NotDivisible);
            }
        }
        Ok(Self {
            off: self.off,
            c: q,
        }
        .trim())
    }

    /// Multiply by t^{2k} - 1.
    pub fn mul_unity(&self, k: usize) -> Result<Self, DenseErr> {
        if self.c.is_empty() {
            return Ok(Self::zero());
        }
        let n = self.c.len();
        let mut c = vec![0i128; n + k];
        for (i, &x) in self.c.iter().enumerate() {
            c[i + k] = x;
            c[i] = c[i].checked_sub(x).ok_or(DenseErr::Overflow)?;
        }
        Ok(Self { off: self.off, c }.trim())
    }

    /// Accumulate sparse · self, the workhorse of operator application.
    pub fn mul_sparse(&self, sparse: &[(i64, i128)]) -> Result<Self, DenseErr> {
        if self.c.is_empty() || sparse.is_empty() {
            return Ok(Self::zero());
        }
        let Some(&(e0, _)) = sparse.first() else {
            return Ok(Self::zero());
        };
        if sparse.iter().any(|&(e, _)| (e - e0) % 2 != 0) {
            return Err(DenseErr::Overflow);
        }
        let emin = sparse.iter().map(|&(e, _)| e).min().unwrap();
        let emax = sparse.iter().map(|&(e, _)| e).max().unwrap();
        let off = self.off + emin;
        let len = self.c.len() + ((emax - emin) / 2) as usize;
        let mut c = vec![0i128; len];
        for &(e, k) in sparse {
            let base = ((e - emin) / 2) as usize;
            for (i, &x) in self.c.iter().enumerate() {
                let add = x.checked_mul(k).ok_or(DenseErr::Overflow)?;
                c[base + i] = c[base + i].checked_add(add).ok_or(DenseErr::Overflow)?;
            }
        }
        Ok(Self { off, c }.trim())
    }
}

/// Sparse view with i128 coefficients; None if any coefficient is too wide.
pub(crate) fn sparse_i128(p: &LaurentPoly1) -> Option<Vec<(i64, i128)>> {
    p.iter()
        .map(|(e, c)| c.to_i128().map(|k| (*e, k)))
        .collect()
}

/// Upper bound on |coefficients| of a product, for choosing the i128 path:
/// max|a| · max|b| · min(terms). Returns None on BigInt values beyond u128.
pub(crate) fn product_bound(max_a: &BigInt, max_b: &BigInt, terms: usize) -> Option<u128> {
    let bound = max_a.abs() * max_b.abs() * BigInt::from(terms);
    bound.to_u128()
}

pub(crate) fn max_abs_coeff(p: &LaurentPoly1) -> BigInt {
    p.iter()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pairs: &[(i64, i64)]) -> LaurentPoly1 {
        LaurentPoly1::from_terms(pairs.iter().map(|&(e, c)| (e, c)))
    }

    #[test]
    fn round_trip() {
        let p = poly(&[(-4, 3), (0, -7), (6, 1)]);
        assert_eq!(DensePoly::from_poly(&p).unwrap().to_poly(), p);
        assert!(DensePoly::from_poly(&poly(&[(0, 1), (1, 1)])).is_none());
    }

    #[test]
    fn div_unity_round_trip() {
        let p = DensePoly::from_poly(&poly(&[(-2, 5), (0, 1), (4, -3)])).unwrap();
        for k in 1..4usize {
            let m = p.mul_unity(k).unwrap();
            assert_eq!(m.div_unity(k).unwrap().to_poly(), p.to_poly());
        }
        let not = DensePoly::from_poly(&poly(&[(0, 1), (2, 1)])).unwrap();
        assert_eq!(not.div_unity(1).unwrap_err(), DenseErr::NotDivisible);
    }

    #[test]
    fn sub_and_sparse_mul_match_exact() {
        let a = poly(&[(-2, 9), (2, -4)]);
        let b = poly(&[(0, 3), (6, 11)]);
        let da = DensePoly::from_poly(&a).unwrap();
        let db = DensePoly::from_poly(&b).unwrap();
        assert_eq!(da.sub(&db).unwrap().to_poly(), &a - &b);
        let s = sparse_i128(&b).unwrap();
        assert_eq!(da.mul_sparse(&s).unwrap().to_poly(), &a * &b);
    }
}
