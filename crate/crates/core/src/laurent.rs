//! Laurent polynomials over arbitrary-precision integers, in one variable and
//! in two (t, M), plus the one-variable rational functions used by exact
//! linear algebra.
//!
//! The one-variable type is variable-agnostic: the same structure carries
//! polynomials in t (values of sequences) and polynomials in M (t = -1
//! specializations). Variable names only matter at serialization time.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("degrees of the zero polynomial are undefined")]
    ZeroPolynomial,
    #[error("no exact quotient exists")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("evaluation at t = 0 is undefined for Laurent polynomials")]
    ZeroEvalPoint,
    #[error("substitution M -> t^a M^0 is not an automorphism")]
    ZeroSubstitution,
    #[error("rational function with zero denominator")]
    ZeroDenominator,
}

/// Laurent polynomial in one variable with BigInt coefficients.
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly1 {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly1 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(0, c)
    }

    /// Single term c * t^e (the zero polynomial if c = 0).
    pub fn term(e: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// t^e with coefficient 1.
    pub fn monomial(e: i64) -> Self {
        Self::term(e, 1)
    }

    pub fn from_terms<I, C>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map_or(false, |c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Multiply by the scalar c.
    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// (d_plus, d_minus, breadth); errors on the zero polynomial.
    pub fn degrees(&self) -> Result<(i64, i64, i64), LaurentError> {
        match (self.max_exp(), self.min_exp()) {
            (Some(hi), Some(lo)) => Ok((hi, lo, hi - lo)),
            _ => Err(LaurentError::ZeroPolynomial),
        }
    }

    /// Exact quotient self / d over the integers.
    ///
    /// Standard leading-term elimination, with one extra stopping rule: the
    /// remainder's breadth can only shrink by steps of breadth(d), so once
    /// max(r) - max(d) sinks below min(r) - min(d) no exact quotient exists.
    pub fn div_exact(&self, d: &Self) -> Result<Self, LaurentError> {
        if d.is_zero() {
            return Err(LaurentError::ZeroDivisor);
        }
        let mut r = self.clone();
        let mut q = Self::zero();
        let (dhi, dlo) = (d.max_exp().unwrap(), d.min_exp().unwrap());
        let dlead = d.terms.get(&dhi).unwrap().clone();
        while let (Some(rhi), Some(rlo)) = (r.max_exp(), r.min_exp()) {
            let e = rhi - dhi;
            if e < rlo - dlo {
                return Err(LaurentError::NotDivisible);
            }
            let rlead = r.terms.get(&rhi).unwrap();
            let (c, rem) = rlead.div_rem(&dlead);
            if !rem.is_zero() {
                return Err(LaurentError::NotDivisible);
            }
            q.add_term(e, c.clone());
            for (de, dc) in d.iter() {
                r.add_term(de + e, -(dc * &c));
            }
        }
        Ok(q)
    }

    /// Greatest common divisor over Q[t^{±1}], returned as a primitive integer
    /// polynomial with minimal exponent 0 and positive leading coefficient.
    /// Primitive pseudo-remainder sequence.
    pub fn gcd_rational(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.shifted_primitive();
        }
        if other.is_zero() {
            return self.shifted_primitive();
        }
        let mut a = self.shifted_primitive();
        let mut b = other.shifted_primitive();
        if a.max_exp().unwrap() < b.max_exp().unwrap() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = pseudo_rem(&a, &b);
            if r.is_zero() {
                return b.shifted_primitive();
            }
            a = b;
            b = r.shifted_primitive();
            if a.max_exp().unwrap() < b.max_exp().unwrap() {
                std::mem::swap(&mut a, &mut b);
            }
        }
    }

    /// Nonnegative gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// self shifted to minimal exponent 0, divided by ±content so the leading
    /// coefficient is positive. Identity-shaped unit for the zero polynomial.
    pub fn shifted_primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lo = self.min_exp().unwrap();
        let mut c = self.content();
        if self
            .terms
            .get(&self.max_exp().unwrap())
            .unwrap()
            .is_negative()
        {
            c = -c;
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (e - lo, k / &c)).collect(),
        }
    }

    pub fn eval_complex(&self, t0: Complex64) -> Result<Complex64, LaurentError> {
        if t0 == Complex64::new(0.0, 0.0) && self.min_exp().map_or(false, |e| e < 0) {
            return Err(LaurentError::ZeroEvalPoint);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.iter() {
            let ef = *e as i32;
            acc += Complex64::new(c.to_f64().unwrap_or(f64::INFINITY), 0.0) * t0.powi(ef);
        }
        Ok(acc)
    }

    /// Evaluation at t = t0 in Z/p for odd prime p, t0 not divisible by p.
    pub fn eval_mod(&self, t0: u64, p: u64) -> u64 {
        let mut acc: u64 = 0;
        let inv = pow_mod(t0, p - 2, p);
        for (e, c) in self.iter() {
            let base = if *e >= 0 { t0 } else { inv };
            let pw = pow_mod(base, e.unsigned_abs(), p);
            let cm = {
                let r = c.mod_floor(&BigInt::from(p));
                r.to_u64().unwrap()
            };
            acc = (acc + mul_mod(cm, pw, p)) % p;
        }
        acc
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// lc(b)^(da-db+1) * a mod b over Z[t], operands with min exponent 0.
fn pseudo_rem(a: &LaurentPoly1, b: &LaurentPoly1) -> LaurentPoly1 {
    let db = b.max_exp().unwrap();
    let lb = b.terms.get(&db).unwrap().clone();
    let mut r = a.clone();
    while let Some(dr) = r.max_exp() {
        if dr < db {
            break;
        }
        let lead = r.terms.get(&dr).unwrap().clone();
        r = r.scale(&lb);
        for (e, c) in b.iter() {
            r.add_term(e + (dr - db), -(c * &lead));
        }
    }
    r
}

impl std::fmt::Debug for LaurentPoly1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &LaurentPoly1 {
    type Output = LaurentPoly1;
    fn add(self, rhs: Self) -> LaurentPoly1 {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly1 {
    type Output = LaurentPoly1;
    fn sub(self, rhs: Self) -> LaurentPoly1 {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly1 {
    type Output = LaurentPoly1;
    fn mul(self, rhs: Self) -> LaurentPoly1 {
        let mut out = LaurentPoly1::zero();
        for (e1, c1) in self.iter() {
            for (e2, c2) in rhs.iter() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly1 {
    type Output = LaurentPoly1;
    fn neg(self) -> LaurentPoly1 {
        LaurentPoly1 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

/// Laurent polynomial in (t, M) with BigInt coefficients, terms ordered
/// lexicographically by (t-exponent, M-exponent).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, 0, 1)
    }

    /// Single term c * t^i M^j.
    pub fn term(i: i64, j: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn from_terms<I, C>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (i, j, c) in iter {
            p.add_term(i, j, c.into());
        }
        p
    }

    /// Embed a polynomial in t alone.
    pub fn from_t(p: &LaurentPoly1) -> Self {
        Self {
            terms: p.iter().map(|(e, c)| ((*e, 0), c.clone())).collect(),
        }
    }

    /// Embed a polynomial in M alone.
    pub fn from_m(p: &LaurentPoly1) -> Self {
        Self {
            terms: p.iter().map(|(e, c)| ((0, *e), c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, i: i64, j: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// M ↦ t^a M^b; errors when b = 0.
    pub fn subst_m(&self, a: i64, b: i64) -> Result<Self, LaurentError> {
        if b == 0 {
            return Err(LaurentError::ZeroSubstitution);
        }
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i + a * j, b * j), c.clone()))
                .collect(),
        })
    }

    /// t ↦ -1, leaving a Laurent polynomial in M over the integers.
    pub fn spec_t_minus1(&self) -> LaurentPoly1 {
        let mut out = LaurentPoly1::zero();
        for (&(i, j), c) in self.iter() {
            let signed = if i.rem_euclid(2) == 0 { c.clone() } else { -c };
            out.add_term(j, signed);
        }
        out
    }

    /// M ↦ t^{2n}, the value an operator coefficient takes on the n-th term.
    pub fn spec_m(&self, n: i64) -> LaurentPoly1 {
        let mut out = LaurentPoly1::zero();
        for (&(i, j), c) in self.iter() {
            out.add_term(i + 2 * n * j, c.clone());
        }
        out
    }

    /// Multiply by t^i M^j.
    pub fn shift(&self, i: i64, j: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + i, b + j), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiply by a polynomial in t alone.
    pub fn mul_t(&self, p: &LaurentPoly1) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in self.iter() {
            for (e, k) in p.iter() {
                out.add_term(i + e, j, c * k);
            }
        }
        out
    }

    /// Smallest and largest M-exponent, None for the zero polynomial.
    pub fn m_support(&self) -> Option<(i64, i64)> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &(_, j) in self.terms.keys() {
            lo = lo.min(j);
            hi = hi.max(j);
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Coefficient of M^j as a polynomial in t.
    pub fn m_slice(&self, j: i64) -> LaurentPoly1 {
        let mut out = LaurentPoly1::zero();
        for (&(i, jj), c) in self.iter() {
            if jj == j {
                out.add_term(i, c.clone());
            }
        }
        out
    }

    /// Decompose into M-power slices (M-exponent, coefficient in t).
    pub fn m_slices(&self) -> BTreeMap<i64, LaurentPoly1> {
        let mut out: BTreeMap<i64, LaurentPoly1> = BTreeMap::new();
        for (&(i, j), c) in self.iter() {
            out.entry(j).or_default().add_term(i, c.clone());
        }
        out
    }

    pub fn from_m_slices(slices: BTreeMap<i64, LaurentPoly1>) -> Self {
        let mut out = Self::zero();
        for (j, p) in slices {
            for (i, c) in p.iter() {
                out.add_term(*i, j, c.clone());
            }
        }
        out
    }

    /// Exact quotient by an M-free divisor, dividing each M-power slice.
    pub fn div_exact_t(&self, d: &LaurentPoly1) -> Result<Self, LaurentError> {
        let mut out = BTreeMap::new();
        for (j, slice) in self.m_slices() {
            out.insert(j, slice.div_exact(d)?);
        }
        Ok(Self::from_m_slices(out))
    }
}

impl std::fmt::Debug for LaurentPoly2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| format!("{c}*t^{i}*M^{j}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(self, rhs: Self) -> LaurentPoly2 {
        let mut out = self.clone();
        for (&(i, j), c) in rhs.iter() {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(self, rhs: Self) -> LaurentPoly2 {
        let mut out = self.clone();
        for (&(i, j), c) in rhs.iter() {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, rhs: Self) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for (&(i1, j1), c1) in self.iter() {
            for (&(i2, j2), c2) in rhs.iter() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn neg(self) -> LaurentPoly2 {
        LaurentPoly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

/// Quotient of one-variable Laurent polynomials; denominator nonzero,
/// equality by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunc1 {
    num: LaurentPoly1,
    den: LaurentPoly1,
}

impl RationalFunc1 {
    pub fn new(num: LaurentPoly1, den: LaurentPoly1) -> Result<Self, LaurentError> {
        if den.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: LaurentPoly1) -> Self {
        Self {
            num: p,
            den: LaurentPoly1::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly1::zero())
    }

    pub fn num(&self) -> &LaurentPoly1 {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly1 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Canonical form: gcd over Q removed, matched integer content removed,
    /// denominator shifted to minimal exponent 0 with positive leading
    /// coefficient.
    pub fn reduce(&self) -> Self {
        if self.num.is_zero() {
            return Self {
                num: LaurentPoly1::zero(),
                den: LaurentPoly1::one(),
            };
        }
        let g = self.num.gcd_rational(&self.den);
        let mut num = self.num.div_exact(&g).expect("gcd divides numerator");
        let mut den = self.den.div_exact(&g).expect("gcd divides denominator");
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num
                .div_exact(&LaurentPoly1::constant(c.clone()))
                .expect("content divides");
            den = den
                .div_exact(&LaurentPoly1::constant(c))
                .expect("content divides");
        }
        let k = den.min_exp().unwrap();
        num = num.shift(-k);
        den = den.shift(-k);
        if den.coeff(den.max_exp().unwrap()).is_negative() {
            num = -&num;
            den = -&den;
        }
        Self { num, den }
    }

    /// The value as a Laurent polynomial over Z, when the reduced denominator
    /// divides exactly.
    pub fn as_laurent(&self) -> Option<LaurentPoly1> {
        self.num.div_exact(&self.den).ok()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
        .reduce()
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, LaurentError> {
        if rhs.num.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(Self {
            num: &self.num * &rhs.den,
            den: &self.den * &rhs.num,
        }
        .reduce())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl PartialEq for RationalFunc1 {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunc1 {}
