//! The quantum torus of q-difference operators: normal form Σ_k a_k(t,M) L^k
//! with the commutation LM = t² ML, the action on sequences, the ε map
//! (t = −1), and the mirror involution.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::dense::{max_abs_coeff, product_bound, sparse_i128, DensePoly};
use crate::jones::JonesSequence;
use crate::laurent::{LaurentError, LaurentPoly1, LaurentPoly2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QTorusError {
    #[error("the zero operator cannot be normalized")]
    ZeroOperator,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Laurent polynomial in M with rational coefficients (the coefficient ring
/// of ε-images and A-polynomials).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl MPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, BigRational::one())
    }

    pub fn term(e: i64, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn monomial(e: i64) -> Self {
        Self::term(e, BigRational::one())
    }

    pub fn from_int(p: &LaurentPoly1) -> Self {
        Self {
            terms: p
                .iter()
                .map(|(e, c)| (*e, BigRational::from_integer(c.clone())))
                .collect(),
        }
    }

    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Clear denominators and content: the unique primitive integer polynomial
    /// q with positive leading coefficient such that self = (a/b)·q.
    pub fn primitive_int(&self) -> LaurentPoly1 {
        if self.is_zero() {
            return LaurentPoly1::zero();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let scaled = LaurentPoly1::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.numer() * (&den / c.denom()))),
        );
        let mut content = scaled.content();
        let lead = scaled.coeff(scaled.max_exp().unwrap());
        if lead.is_negative() {
            content = -content;
        }
        scaled
            .div_exact(&LaurentPoly1::constant(content))
            .expect("content divides")
    }

    pub fn eval_at_one(&self) -> BigRational {
        self.terms.values().sum()
    }
}

impl std::fmt::Debug for MPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*M^{e}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: Self) -> MPoly {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: Self) -> MPoly {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: Self) -> MPoly {
        let mut out = MPoly::zero();
        for (e1, c1) in self.iter() {
            for (e2, c2) in rhs.iter() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

/// Commutative polynomial in L whose coefficients are rational Laurent
/// polynomials in M; the codomain of ε.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CommutativeMLPoly {
    coeffs: BTreeMap<i64, MPoly>,
}

impl CommutativeMLPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, MPoly::one())
    }

    pub fn term(l: i64, c: MPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(l, c);
        }
        Self { coeffs }
    }

    pub fn from_coeffs<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, MPoly)>,
    {
        let mut p = Self::zero();
        for (l, c) in iter {
            p.add_coeff(l, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &MPoly)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, l: i64) -> MPoly {
        self.coeffs.get(&l).cloned().unwrap_or_default()
    }

    pub fn add_coeff(&mut self, l: i64, c: MPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(l).or_default();
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&l);
        }
    }

    pub fn l_support(&self) -> Option<(i64, i64)> {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(&lo), Some(&hi)) => Some((lo, hi)),
            _ => None,
        }
    }

    /// Multiply by M^j L^k (commutative).
    pub fn shift(&self, j: i64, k: i64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(l, c)| (l + k, c.shift(j)))
                .collect(),
        }
    }

    /// Value at L = 1 (detects divisibility by L − 1 over the M-field).
    pub fn eval_l_one(&self) -> MPoly {
        let mut acc = MPoly::zero();
        for (_, c) in self.iter() {
            acc = &acc + c;
        }
        acc
    }
}

impl std::fmt::Debug for CommutativeMLPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(l, c)| format!("({c:?})*L^{l}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &CommutativeMLPoly {
    type Output = CommutativeMLPoly;
    fn add(self, rhs: Self) -> CommutativeMLPoly {
        let mut out = self.clone();
        for (l, c) in rhs.iter() {
            out.add_coeff(*l, c.clone());
        }
        out
    }
}

impl Sub for &CommutativeMLPoly {
    type Output = CommutativeMLPoly;
    fn sub(self, rhs: Self) -> CommutativeMLPoly {
        let mut out = self.clone();
        for (l, c) in rhs.iter() {
            out.add_coeff(*l, -c);
        }
        out
    }
}

impl Mul for &CommutativeMLPoly {
    type Output = CommutativeMLPoly;
    fn mul(self, rhs: Self) -> CommutativeMLPoly {
        let mut out = CommutativeMLPoly::zero();
        for (l1, c1) in self.iter() {
            for (l2, c2) in rhs.iter() {
                out.add_coeff(l1 + l2, c1 * c2);
            }
        }
        out
    }
}

/// Element of 𝓣 = 𝓡⟨L^{±1}, M^{±1}⟩ / (LM − t²ML) in normal form
/// Σ_k a_k(t,M) L^k.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QTorusOperator {
    coeffs: BTreeMap<i64, LaurentPoly2>,
}

impl QTorusOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::term(0, LaurentPoly2::one())
    }

    pub fn l() -> Self {
        Self::term(1, LaurentPoly2::one())
    }

    pub fn m() -> Self {
        Self::term(0, LaurentPoly2::term(0, 1, 1))
    }

    /// a(t,M) L^k.
    pub fn term(k: i64, a: LaurentPoly2) -> Self {
        let mut coeffs = BTreeMap::new();
        if !a.is_zero() {
            coeffs.insert(k, a);
        }
        Self { coeffs }
    }

    pub fn from_coeffs<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, LaurentPoly2)>,
    {
        let mut out = Self::zero();
        for (k, a) in iter {
            out.add_coeff(k, a);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &LaurentPoly2)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, k: i64) -> LaurentPoly2 {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn add_coeff(&mut self, k: i64, a: LaurentPoly2) {
        if a.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(k).or_default();
        *entry = &*entry + &a;
        if entry.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn l_support(&self) -> Option<(i64, i64)> {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(&lo), Some(&hi)) => Some((lo, hi)),
            _ => None,
        }
    }

    /// Largest |M-exponent| over all coefficients (0 for M-free operators).
    pub fn m_radius(&self) -> i64 {
        self.coeffs
            .values()
            .filter_map(|a| a.m_support())
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Σ_k lp_spec_M(a_k, n) · f(n + k).
    pub fn apply(&self, f: &JonesSequence, n: i64) -> LaurentPoly1 {
        if let Some(out) = self.apply_dense(f, n) {
            return out;
        }
        let mut acc = LaurentPoly1::zero();
        for (k, a) in self.iter() {
            let spec = a.spec_m(n);
            let val = f.eval(n + k);
            acc = &acc + &(&spec * &val);
        }
        acc
    }

    /// i128 half-lattice path; None when anything fails to fit.
    fn apply_dense(&self, f: &JonesSequence, n: i64) -> Option<LaurentPoly1> {
        let mut bound: u128 = 0;
        let mut parts = Vec::with_capacity(self.coeffs.len());
        for (k, a) in self.iter() {
            let spec = a.spec_m(n);
            let val = f.eval(n + k);
            if spec.is_zero() || val.is_zero() {
                continue;
            }
            let b = product_bound(
                &max_abs_coeff(&spec),
                &max_abs_coeff(&val),
                spec.num_terms().min(val.num_terms()),
            )?;
            bound = bound.checked_add(b)?;
            parts.push((spec, val));
        }
        if bound > (i128::MAX / 4) as u128 {
            return None;
        }
        let mut acc = DensePoly::zero();
        for (spec, val) in parts {
            let sp = sparse_i128(&spec)?;
            let dv = DensePoly::from_poly(&val)?;
            let prod = dv.mul_sparse(&sp).ok()?;
            acc = acc.add(&prod).ok()?;
        }
        Some(acc.to_poly())
    }

    /// ε: t ↦ −1 coefficientwise, L made commutative.
    pub fn epsilon(&self) -> CommutativeMLPoly {
        CommutativeMLPoly::from_coeffs(
            self.iter()
                .map(|(k, a)| (*k, MPoly::from_int(&a.spec_t_minus1()))),
        )
    }

    /// Mirror involution: Σ a_k(t,M) L^k ↦ Σ a_k(t, t^{−2}M^{−1}) L^{−k}.
    /// If P annihilates J_K then mirror(P) annihilates the mirror knot's
    /// colored Jones function.
    pub fn mirror(&self) -> Self {
        Self::from_coeffs(self.iter().map(|(k, a)| {
            (
                -k,
                a.subst_m(-2, -1).expect("b = -1 is a valid substitution"),
            )
        }))
    }

    /// Left-multiply by a power of L so the minimal L-exponent is 0, then
    /// divide out the common integer content.
    pub fn normalize(&self) -> Result<Self, QTorusError> {
        let (lo, _) = self.l_support().ok_or(QTorusError::ZeroOperator)?;
        let shifted = &Self::term(-lo, LaurentPoly2::one()) * self;
        let mut content = BigInt::zero();
        'outer: for a in shifted.coeffs.values() {
            for (_, c) in a.iter() {
                content = content.gcd(c);
                if content.is_one() {
                    break 'outer;
                }
            }
        }
        if content.is_one() {
            return Ok(shifted);
        }
        let inv = LaurentPoly1::constant(content);
        Ok(Self::from_coeffs(shifted.iter().map(|(k, a)| {
            (
                *k,
                a.div_exact_t(&inv).expect("content divides every slice"),
            )
        })))
    }
}

impl std::fmt::Debug for QTorusOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, a)| format!("({a:?})*L^{k}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &QTorusOperator {
    type Output = QTorusOperator;
    fn add(self, rhs: Self) -> QTorusOperator {
        let mut out = self.clone();
        for (k, a) in rhs.iter() {
            out.add_coeff(*k, a.clone());
        }
        out
    }
}

impl Sub for &QTorusOperator {
    type Output = QTorusOperator;
    fn sub(self, rhs: Self) -> QTorusOperator {
        let mut out = self.clone();
        for (k, a) in rhs.iter() {
            out.add_coeff(*k, -a);
        }
        out
    }
}

/// a(M)L^k · b(M)L^l = a(M) b(t^{2k}M) L^{k+l}.
impl Mul for &QTorusOperator {
    type Output = QTorusOperator;
    fn mul(self, rhs: Self) -> QTorusOperator {
        let mut out = QTorusOperator::zero();
        for (k, a) in self.iter() {
            for (l, b) in rhs.iter() {
                let twisted = b.subst_m(2 * k, 1).expect("b = 1 substitution");
                out.add_coeff(k + l, &*a * &twisted);
            }
        }
        out
    }
}

impl Neg for &QTorusOperator {
    type Output = QTorusOperator;
    fn neg(self) -> QTorusOperator {
        QTorusOperator {
            coeffs: self.coeffs.iter().map(|(k, a)| (*k, -a)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::qint;
    use proptest::prelude::*;

    #[test]
    fn commutation_rule() {
        let lm = &QTorusOperator::l() * &QTorusOperator::m();
        assert_eq!(lm, QTorusOperator::term(1, LaurentPoly2::term(2, 1, 1)));
        let ml_l = &QTorusOperator::m() * &QTorusOperator::l();
        let t2 = QTorusOperator::term(0, LaurentPoly2::term(2, 0, 1));
        assert_eq!(lm, &t2 * &ml_l);
    }

    #[test]
    fn ml_squared() {
        let ml = &QTorusOperator::m() * &QTorusOperator::l();
        assert_eq!(
            &ml * &ml,
            QTorusOperator::term(2, LaurentPoly2::term(2, 2, 1))
        );
    }

    #[test]
    fn apply_examples() {
        let qi = JonesSequence::quantum_integer();
        assert_eq!(QTorusOperator::l().apply(&qi, 2), qint(3));
        let ones = JonesSequence::custom("ones", |_| LaurentPoly1::one());
        let ml = &QTorusOperator::m() * &QTorusOperator::l();
        for n in -3..=3 {
            assert_eq!(ml.apply(&ones, n), LaurentPoly1::monomial(2 * n));
        }
        let f = JonesSequence::custom("t^(n^2+n)", |n| LaurentPoly1::monomial(n * n + n));
        let op = &QTorusOperator::l() - &QTorusOperator::term(0, LaurentPoly2::term(2, 1, 1));
        for n in -4..=4 {
            assert!(op.apply(&f, n).is_zero());
        }
    }

    #[test]
    fn epsilon_examples() {
        let a = QTorusOperator::term(2, LaurentPoly2::term(1, 1, 1));
        let eps = a.epsilon();
        assert_eq!(
            eps.coeff(2),
            MPoly::term(1, BigRational::from_integer((-1).into()))
        );
        let onept = QTorusOperator::term(0, &LaurentPoly2::one() + &LaurentPoly2::term(1, 0, 1));
        let any = QTorusOperator::from_coeffs([
            (1, LaurentPoly2::term(3, -2, 7)),
            (-1, LaurentPoly2::term(0, 1, -2)),
        ]);
        assert!((&onept * &any).epsilon().is_zero());
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(
            QTorusOperator::l().mirror(),
            QTorusOperator::term(-1, LaurentPoly2::one())
        );
        assert_eq!(
            QTorusOperator::m().mirror(),
            QTorusOperator::term(0, LaurentPoly2::term(-2, -1, 1))
        );
    }

    #[test]
    fn normalize_examples() {
        let a = &QTorusOperator::term(-1, LaurentPoly2::term(2, 0, 1)) + &QTorusOperator::l();
        let expect = &QTorusOperator::term(0, LaurentPoly2::term(2, 0, 1))
            + &QTorusOperator::term(2, LaurentPoly2::one());
        assert_eq!(a.normalize().unwrap(), expect);
        let b = &QTorusOperator::term(1, LaurentPoly2::term(0, 0, 2))
            + &QTorusOperator::term(0, LaurentPoly2::term(0, 0, 2));
        let expect_b = &QTorusOperator::l() + &QTorusOperator::identity();
        assert_eq!(b.normalize().unwrap(), expect_b);
        assert_eq!(expect_b.normalize().unwrap(), expect_b);
        assert_eq!(
            QTorusOperator::zero().normalize(),
            Err(QTorusError::ZeroOperator)
        );
    }

    fn arb_poly2() -> impl Strategy<Value = LaurentPoly2> {
        prop::collection::vec(((-3i64..=3), (-3i64..=3), (-7i64..=7)), 0..4)
            .prop_map(|v| LaurentPoly2::from_terms(v.into_iter().map(|(i, j, c)| (i, j, c))))
    }

    fn arb_op() -> impl Strategy<Value = QTorusOperator> {
        prop::collection::vec(((-2i64..=2), arb_poly2()), 1..4)
            .prop_map(QTorusOperator::from_coeffs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn identity_neutral(a in arb_op()) {
            prop_assert_eq!(&QTorusOperator::identity() * &a, a.clone());
            prop_assert_eq!(&a * &QTorusOperator::identity(), a);
        }

        #[test]
        fn mul_associative(a in arb_op(), b in arb_op(), c in arb_op()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn mul_distributes(a in arb_op(), b in arb_op(), c in arb_op()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn action_is_homomorphism(a in arb_op(), b in arb_op(), n in -3i64..=3) {
            let qi = JonesSequence::quantum_integer();
            let lhs = (&a * &b).apply(&qi, n);
            let g = JonesSequence::custom("b on qint", {
                let b = b.clone();
                let qi = qi.clone();
                move |m| b.apply(&qi, m)
            });
            let rhs = a.apply(&g, n);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn epsilon_multiplicative(a in arb_op(), b in arb_op()) {
            let lhs = (&a * &b).epsilon();
            let rhs = &a.epsilon() * &b.epsilon();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mirror_involution_and_hom(a in arb_op(), b in arb_op()) {
            prop_assert_eq!(a.mirror().mirror(), a.clone());
            prop_assert_eq!((&a * &b).mirror(), &a.mirror() * &b.mirror());
        }
    }
}
