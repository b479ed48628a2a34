//! The cable's A-polynomial, proportionality over ℚ(M), the AJ certificate
//! check ε(S) ≐ A, and the irreducibility probe for ε(Q).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::laurent::{LaurentPoly1, RationalFunc1};
use crate::qtorus::{CommutativeMLPoly, MPoly};
use crate::recurrence::{build_s, AnnihilatorCertificate, RecurrenceError};

#[derive(Debug, Error)]
pub enum ApolyError {
    #[error("cable framing r must be odd")]
    EvenR,
    #[error("proportionality comparison requires nonzero inputs")]
    ZeroInput,
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

/// The certificate comparison: ε(S) against the cable A-polynomial, with the
/// proportionality witness (a rational function in M) or the violating
/// coefficient pairs.
#[derive(Debug, Clone)]
pub struct AJReport {
    pub r: i64,
    pub epsilon_s: CommutativeMLPoly,
    pub a_poly: CommutativeMLPoly,
    pub proportional: bool,
    pub witness: Option<RationalFunc1>,
    pub failures: Vec<(i64, i64)>,
    pub annihilation_checked: Vec<i64>,
}

fn v_poly() -> MPoly {
    MPoly::from_int(&LaurentPoly1::from_terms([
        (8, 1),
        (-8, 1),
        (4, -1),
        (-4, -1),
        (0, -2),
    ]))
}

/// (L−1){L² − ((M⁸+M^{−8}−M⁴−M^{−4}−2)² − 2)L + 1}(L + M^{−2r}), expanded.
pub fn a_polynomial_cable(r: i64) -> Result<CommutativeMLPoly, ApolyError> {
    if r % 2 == 0 {
        return Err(ApolyError::EvenR);
    }
    let one = MPoly::one();
    let l_minus_1 =
        &CommutativeMLPoly::term(1, one.clone()) - &CommutativeMLPoly::term(0, one.clone());
    let v = v_poly();
    let middle = &(&CommutativeMLPoly::term(2, one.clone())
        - &CommutativeMLPoly::term(
            1,
            &(&v * &v) - &MPoly::from_int(&LaurentPoly1::constant(BigInt::from(2))),
        ))
        + &CommutativeMLPoly::term(0, one.clone());
    let last =
        &CommutativeMLPoly::term(1, one) + &CommutativeMLPoly::term(0, MPoly::monomial(-2 * r));
    Ok(&(&l_minus_1 * &middle) * &last)
}

struct Proportionality {
    proportional: bool,
    witness: Option<RationalFunc1>,
    failures: Vec<(i64, i64)>,
}

fn proportionality(
    f: &CommutativeMLPoly,
    g: &CommutativeMLPoly,
) -> Result<Proportionality, ApolyError> {
    let (Some((flo, fhi)), Some((glo, ghi))) = (f.l_support(), g.l_support()) else {
        return Err(ApolyError::ZeroInput);
    };
    let lo = flo.min(glo);
    let hi = fhi.max(ghi);
    let mut failures = Vec::new();
    for i in lo..=hi {
        for j in i + 1..=hi {
            let left = &f.coeff(i) * &g.coeff(j);
            let right = &f.coeff(j) * &g.coeff(i);
            if left != right {
                failures.push((i, j));
            }
        }
    }
    let proportional = failures.is_empty();
    let witness = if proportional {
        let pivot = (lo..=hi)
            .find(|&i| !f.coeff(i).is_zero())
            .expect("nonzero input has a nonzero coefficient");
        Some(ratio_of(&f.coeff(pivot), &g.coeff(pivot)))
    } else {
        None
    };
    Ok(Proportionality {
        proportional,
        witness,
        failures,
    })
}

/// The exact quotient f/g of two nonzero rational Laurent polynomials in M,
/// as a reduced integer-coefficient rational function.
fn ratio_of(f: &MPoly, g: &MPoly) -> RationalFunc1 {
    let nf = f.primitive_int();
    let ng = g.primitive_int();
    let lead = |p: &MPoly, q: &LaurentPoly1| -> BigRational {
        let (e, c) = p.iter().last().expect("nonzero");
        c / &BigRational::from_integer(q.coeff(*e))
    };
    let scale = lead(f, &nf) / lead(g, &ng);
    RationalFunc1::new(nf.scale(scale.numer()), ng.scale(scale.denom()))
        .expect("g nonzero")
        .reduce()
}

/// f ≐ g: true iff the L-coefficient sequences are proportional over ℚ(M);
/// the witness is the common ratio f/g.
pub fn eq_up_to_m(
    f: &CommutativeMLPoly,
    g: &CommutativeMLPoly,
) -> Result<(bool, Option<RationalFunc1>), ApolyError> {
    let p = proportionality(f, g)?;
    Ok((p.proportional, p.witness))
}

/// Compare ε(S) of an already-built certificate with the cable's
/// A-polynomial up to an M-factor.
pub fn report_for_certificate(cert: &AnnihilatorCertificate) -> Result<AJReport, ApolyError> {
    let epsilon_s = cert.operator.epsilon();
    let a_poly = a_polynomial_cable(cert.r)?;
    let p = proportionality(&epsilon_s, &a_poly)?;
    Ok(AJReport {
        r: cert.r,
        epsilon_s,
        a_poly,
        proportional: p.proportional,
        witness: p.witness,
        failures: p.failures,
        annihilation_checked: cert.checked_range.clone(),
    })
}

/// Run the full certificate for the (r,2)-cable: build S, check annihilation
/// on n = 1..=n_check, and compare ε(S) with the A-polynomial up to an
/// M-factor.
pub fn check_aj(r: i64, n_check: i64) -> Result<AJReport, ApolyError> {
    if r % 2 == 0 {
        return Err(ApolyError::EvenR);
    }
    let cert = build_s(r, n_check)?;
    report_for_certificate(&cert)
}

/// Exact square root in ℚ[M^{±1}], top-down long division.
fn mpoly_sqrt(p: &MPoly) -> Option<MPoly> {
    if p.is_zero() {
        return Some(MPoly::zero());
    }
    let (&hi, chi) = p.iter().last().unwrap();
    let (&lo, _) = p.iter().next().unwrap();
    if hi % 2 != 0 || lo % 2 != 0 {
        return None;
    }
    let (h, l) = (hi / 2, lo / 2);
    let lead = rational_sqrt(chi)?;
    let mut s = MPoly::term(h, lead.clone());
    let mut remaining = p - &(&s * &s);
    let two_lead = &lead + &lead;
    while !remaining.is_zero() {
        let (&d, c) = remaining.iter().last().unwrap();
        let e = d - h;
        if e >= h || e < l {
            return None;
        }
        let tau = MPoly::term(e, c / &two_lead);
        remaining = &remaining - &(&(&(&s + &s) + &tau) * &tau);
        s = &s + &tau;
    }
    Some(s)
}

fn rational_sqrt(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let int_sqrt = |x: &BigInt| -> Option<BigInt> {
        let r = x.sqrt();
        (&r * &r == *x).then_some(r)
    };
    Some(BigRational::new(int_sqrt(c.numer())?, int_sqrt(c.denom())?))
}

/// True when ε(Q)'s quadratic L-factor has no root in ℚ(M): its discriminant
/// ((M⁸+M^{−8}−M⁴−M^{−4}−2)² − 2)² − 4 admits no Laurent-polynomial square
/// root. A ℚ(M)-irreducibility surrogate for the stronger ℂ[M^{±1}, L] claim.
pub fn irreducibility_probe() -> bool {
    let v = v_poly();
    let two = MPoly::from_int(&LaurentPoly1::constant(BigInt::from(2)));
    let four = MPoly::from_int(&LaurentPoly1::constant(BigInt::from(4)));
    let inner = &(&v * &v) - &two;
    let disc = &(&inner * &inner) - &four;
    mpoly_sqrt(&disc).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> MPoly {
        MPoly::from_int(&LaurentPoly1::constant(BigInt::from(n)))
    }

    #[test]
    fn a_poly_shape() {
        let a = a_polynomial_cable(9).unwrap();
        assert_eq!(a.l_support(), Some((0, 4)));
        assert_eq!(a.coeff(4), MPoly::one());
        assert_eq!(a.coeff(0), -&MPoly::monomial(-18));
        assert!(matches!(a_polynomial_cable(2), Err(ApolyError::EvenR)));
    }

    #[test]
    fn a_poly_at_m_one() {
        // substitute M = 1: (L−1)³(L+1) = L⁴ − 2L³ + 2L − 1
        let a = a_polynomial_cable(9).unwrap();
        let at_one: Vec<BigRational> = (0..=4).map(|k| a.coeff(k).eval_at_one()).collect();
        let expect: Vec<BigRational> = [-1i64, 2, 0, -2, 1]
            .iter()
            .map(|&n| BigRational::from_integer(BigInt::from(n)))
            .collect();
        assert_eq!(at_one, expect);
    }

    #[test]
    fn a_poly_l_minus_one_divisibility() {
        // divisible by L−1 exactly once: Horner quotient exists and does not
        // itself vanish at L = 1
        for r in [3i64, 5, 9, -9, 11] {
            let a = a_polynomial_cable(r).unwrap();
            assert!(a.eval_l_one().is_zero(), "r = {r}");
            let (_, hi) = a.l_support().unwrap();
            let mut quotient = CommutativeMLPoly::zero();
            let mut carry = MPoly::zero();
            for k in (1..=hi).rev() {
                carry = &carry + &a.coeff(k);
                quotient.add_coeff(k - 1, carry.clone());
            }
            assert_eq!(-&carry, a.coeff(0), "r = {r}");
            assert!(!quotient.eval_l_one().is_zero(), "r = {r}");
        }
    }

    #[test]
    fn eq_up_to_m_examples() {
        let g = &(&CommutativeMLPoly::term(2, MPoly::monomial(1))
            + &CommutativeMLPoly::term(1, int(-3)))
            + &CommutativeMLPoly::term(0, MPoly::monomial(-2));
        let f =
            CommutativeMLPoly::from_coeffs(g.iter().map(|(k, c)| (*k, c * &MPoly::monomial(1))));
        let (ok, w) = eq_up_to_m(&f, &g).unwrap();
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w.num(), &LaurentPoly1::monomial(1));
        assert_eq!(w.den(), &LaurentPoly1::one());

        let l_plus =
            &CommutativeMLPoly::term(1, MPoly::one()) + &CommutativeMLPoly::term(0, MPoly::one());
        let l_minus =
            &CommutativeMLPoly::term(1, MPoly::one()) - &CommutativeMLPoly::term(0, MPoly::one());
        let (ok, w) = eq_up_to_m(&l_plus, &l_minus).unwrap();
        assert!(!ok);
        assert!(w.is_none());

        // f = (L−1)·M², g = 2(L−1)·M^{−1} → witness M³/2
        let f = CommutativeMLPoly::from_coeffs(
            l_minus.iter().map(|(k, c)| (*k, c * &MPoly::monomial(2))),
        );
        let g = CommutativeMLPoly::from_coeffs(
            l_minus
                .iter()
                .map(|(k, c)| (*k, &(c * &MPoly::monomial(-1)) * &int(2))),
        );
        let (ok, w) = eq_up_to_m(&f, &g).unwrap();
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w.num(), &LaurentPoly1::monomial(3));
        assert_eq!(w.den(), &LaurentPoly1::constant(BigInt::from(2)));
    }

    #[test]
    fn eq_up_to_m_is_equivalence_on_proportional_family() {
        let base = &CommutativeMLPoly::term(3, MPoly::monomial(-1))
            + &CommutativeMLPoly::term(0, &MPoly::monomial(2) - &int(5));
        let scaled = |m: i64, c: i64| {
            CommutativeMLPoly::from_coeffs(
                base.iter()
                    .map(|(k, p)| (*k, &(p * &MPoly::monomial(m)) * &int(c))),
            )
        };
        let (a, b, c) = (scaled(0, 1), scaled(2, -3), scaled(-1, 7));
        for f in [&a, &b, &c] {
            assert!(eq_up_to_m(f, f).unwrap().0);
        }
        assert!(eq_up_to_m(&a, &b).unwrap().0);
        assert!(eq_up_to_m(&b, &a).unwrap().0);
        assert!(eq_up_to_m(&b, &c).unwrap().0);
        assert!(eq_up_to_m(&a, &c).unwrap().0);
        assert!(matches!(
            eq_up_to_m(&a, &CommutativeMLPoly::zero()),
            Err(ApolyError::ZeroInput)
        ));
    }

    #[test]
    fn witness_reproduces_f() {
        let g =
            &CommutativeMLPoly::term(1, MPoly::monomial(2)) + &CommutativeMLPoly::term(0, int(3));
        let f = CommutativeMLPoly::from_coeffs(
            g.iter()
                .map(|(k, c)| (*k, &(c * &MPoly::monomial(-4)) * &int(6))),
        );
        let (ok, w) = eq_up_to_m(&f, &g).unwrap();
        assert!(ok);
        let w = w.unwrap();
        // witness·g = f, cross-multiplied coefficientwise
        for k in 0..=1 {
            let lhs = &f.coeff(k) * &MPoly::from_int(w.den());
            let rhs = &g.coeff(k) * &MPoly::from_int(w.num());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sqrt_controls() {
        assert_eq!(mpoly_sqrt(&MPoly::monomial(4)), Some(MPoly::monomial(2)));
        assert_eq!(mpoly_sqrt(&(&MPoly::monomial(4) + &MPoly::one())), None);
        let p = &(&MPoly::monomial(2) + &int(3)) * &(&MPoly::monomial(2) + &int(3));
        let s = mpoly_sqrt(&p).unwrap();
        assert_eq!(&(&s * &s), &p);
        // rational lead: (M/2 + 1)² has square root over ℚ
        let half = MPoly::term(1, BigRational::new(BigInt::from(1), BigInt::from(2)));
        let q = &(&half + &MPoly::one()) * &(&half + &MPoly::one());
        assert!(mpoly_sqrt(&q).is_some());
    }

    #[test]
    fn discriminant_is_not_a_square() {
        assert!(irreducibility_probe());
    }
}
