//! Arithmetic in the field 𝕄 = ℂ(p)[s]/(s² − p/(1−p)).
//!
//! 𝕄 characterizes the relative amplitudes of constructible Bernoulli states:
//! every element is a(p) + b(p)·s with a, b complex rational functions of p
//! and s = √(p/(1−p)), the relative amplitude of the quoin itself. Elements
//! are immutable values; all operations are pure and return canonical forms.
//!
//! Internally an element is kept over one shared polynomial denominator,
//! (A + B·s)/C, with the verified polynomial gcd of (A, B, C) divided out
//! and C scaled so its largest coefficient is 1. The shared denominator is
//! what keeps chained inverses and products numerically exact: per-part
//! fractions would accumulate unreducible factors and lose the cancellation
//! structure. Coefficients are floating complex numbers with a zero
//! tolerance of 1e−12.

pub mod poly;
pub mod rational;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use poly::{Poly, COEFF_EPS, DEGREE_CAP};
pub use rational::RationalFn;

/// An element (A + B·s)/C of 𝕄 in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldElement {
    /// s⁰ numerator part.
    a: Poly,
    /// s¹ numerator part.
    b: Poly,
    /// Shared denominator, never zero.
    den: Poly,
}

fn one_minus_p() -> Poly {
    Poly::from_real(&[1.0, -1.0]).expect("small poly")
}

impl FieldElement {
    fn canonical(a: Poly, b: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("field element with zero denominator".into()));
        }
        if a.is_zero() && b.is_zero() {
            return Ok(FieldElement {
                a: Poly::zero(),
                b: Poly::zero(),
                den: Poly::one(),
            });
        }
        let (mut a, mut b, mut den) = (a, b, den);
        // alternate scale normalization and gcd reduction to a fixed point;
        // one pass on large products is not always maximal, and the gcd's
        // tolerance windows depend on the scaling
        loop {
            // scale so the denominator's largest coefficient is 1; among
            // near-tied maxima (within 1e−9) take the lowest degree, so the
            // pick cannot flip on ulp drift when re-canonicalizing
            let max_norm = den
                .coeffs()
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            let lead = den
                .coeffs()
                .iter()
                .copied()
                .find(|c| c.norm() >= max_norm * (1.0 - 1e-9))
                .expect("nonzero denominator");
            // already canonical: re-scaling would shift every coefficient
            // by an ulp and re-entering inputs must stay bit-identical
            if (lead - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                let inv = Complex64::new(1.0, 0.0) / lead;
                a = a.scale(inv);
                b = b.scale(inv);
                den = den.scale(inv);
            }

            let mut g = match (a.is_zero(), b.is_zero()) {
                (false, false) => a.gcd(&b),
                (false, true) => a.monic(),
                (true, false) => b.monic(),
                (true, true) => unreachable!(),
            };
            g = g.gcd(&den);
            if g.degree().unwrap_or(0) == 0 {
                break;
            }
            if !a.is_zero() {
                a = a.divrem(&g).0;
            }
            if !b.is_zero() {
                b = b.divrem(&g).0;
            }
            den = den.divrem(&g).0;
        }
        Ok(FieldElement { a, b, den })
    }

    /// Builds an element from the two rational parts a(p) + b(p)·s.
    /// Panics if the cross-multiplied parts exceed the degree cap; use
    /// [`FieldElement::from_polys`] for fallible construction.
    pub fn new(a: RationalFn, b: RationalFn) -> Self {
        let na = a.num().mul(b.den()).expect("degree cap");
        let nb = b.num().mul(a.den()).expect("degree cap");
        let den = a.den().mul(b.den()).expect("degree cap");
        FieldElement::canonical(na, nb, den).expect("nonzero denominator")
    }

    /// Builds an element from polynomial parts (A + B·s)/C.
    pub fn from_polys(a: Poly, b: Poly, den: Poly) -> Result<Self> {
        FieldElement::canonical(a, b, den)
    }

    pub fn zero() -> Self {
        FieldElement {
            a: Poly::zero(),
            b: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        FieldElement {
            a: Poly::one(),
            b: Poly::zero(),
            den: Poly::one(),
        }
    }

    /// The generator s = √(p/(1−p)).
    pub fn s() -> Self {
        FieldElement {
            a: Poly::zero(),
            b: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_complex(c: Complex64) -> Self {
        FieldElement {
            a: Poly::constant(c),
            b: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn from_real(x: f64) -> Self {
        FieldElement::from_complex(Complex64::new(x, 0.0))
    }

    /// The rational element p = s²/(1+s²).
    pub fn rational_p() -> Self {
        FieldElement {
            a: Poly::var(),
            b: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn from_rational(r: RationalFn) -> Self {
        FieldElement::canonical(r.num().clone(), Poly::zero(), r.den().clone())
            .expect("nonzero denominator")
    }

    /// The s⁰ part as a rational function of p.
    pub fn rational_part(&self) -> RationalFn {
        RationalFn::new(self.a.clone(), self.den.clone()).expect("nonzero denominator")
    }

    /// The s¹ part as a rational function of p.
    pub fn s_part(&self) -> RationalFn {
        RationalFn::new(self.b.clone(), self.den.clone()).expect("nonzero denominator")
    }

    /// Raw canonical parts (A, B, C) with the element equal to (A + B·s)/C.
    pub fn parts(&self) -> (&Poly, &Poly, &Poly) {
        (&self.a, &self.b, &self.den)
    }

    /// Zero iff both canonical numerator parts are zero (coefficient
    /// tolerance 1e−12).
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            a: self.a.neg(),
            b: self.b.neg(),
            den: self.den.clone(),
        }
    }

    /// Conjugation: conjugates coefficients only, since s is real and
    /// positive on (0,1).
    pub fn conj(&self) -> Self {
        FieldElement::canonical(self.a.conj(), self.b.conj(), self.den.conj())
            .expect("nonzero denominator")
    }

    pub fn add(&self, other: &FieldElement) -> Result<Self> {
        FieldElement::canonical(
            self.a.mul(&other.den)?.add(&other.a.mul(&self.den)?)?,
            self.b.mul(&other.den)?.add(&other.b.mul(&self.den)?)?,
            self.den.mul(&other.den)?,
        )
    }

    pub fn sub(&self, other: &FieldElement) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product with s² rewritten as p/(1−p); one (1−p) clears the rational
    /// twist:
    /// (A₁+B₁s)(A₂+B₂s) = A₁A₂(1−p) + B₁B₂p + (A₁B₂+B₁A₂)(1−p)·s over
    /// C₁C₂(1−p). When either s-part vanishes no s² term appears and the
    /// (1−p) twist is skipped entirely.
    pub fn mul(&self, other: &FieldElement) -> Result<Self> {
        if self.b.is_zero() || other.b.is_zero() {
            let a = self.a.mul(&other.a)?;
            let b = self.a.mul(&other.b)?.add(&self.b.mul(&other.a)?)?;
            let den = self.den.mul(&other.den)?;
            return FieldElement::canonical(a, b, den);
        }
        let omp = one_minus_p();
        let p = Poly::var();
        let a = self
            .a
            .mul(&other.a)?
            .mul(&omp)?
            .add(&self.b.mul(&other.b)?.mul(&p)?)?;
        let b = self
            .a
            .mul(&other.b)?
            .add(&self.b.mul(&other.a)?)?
            .mul(&omp)?;
        let den = self.den.mul(&other.den)?.mul(&omp)?;
        FieldElement::canonical(a, b, den)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c.norm_sqr() == 0.0 {
            return FieldElement::zero();
        }
        FieldElement {
            a: self.a.scale(c),
            b: self.b.scale(c),
            den: self.den.clone(),
        }
    }

    /// (A − Bs)·C·(1−p) over A²(1−p) − B²p. Only the zero element lacks an
    /// inverse: A² (1−p) = B² p has no polynomial solution with (A,B) ≠ 0
    /// because p/(1−p) is not a square in ℂ(p). Pure-rational and pure-s
    /// elements invert without the conjugation detour.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let omp = one_minus_p();
        let p = Poly::var();
        if self.b.is_zero() {
            // 1/(A/C) = C/A
            return FieldElement::canonical(self.den.clone(), Poly::zero(), self.a.clone());
        }
        if self.a.is_zero() {
            // 1/(Bs/C) = C(1−p)s / (Bp)
            return FieldElement::canonical(
                Poly::zero(),
                self.den.mul(&omp)?,
                self.b.mul(&p)?,
            );
        }
        let norm = self
            .a
            .mul(&self.a)?
            .mul(&omp)?
            .sub(&self.b.mul(&self.b)?.mul(&p)?)?;
        let mut scale = self.den.mul(&omp)?;
        let mut norm = norm;
        // the scale C(1−p) often divides the norm outright (chained
        // inverses); cancelling it here keeps degrees from doubling
        let g = scale.gcd(&norm);
        if g.degree().unwrap_or(0) > 0 {
            scale = scale.divrem(&g).0;
            norm = norm.divrem(&g).0;
        }
        FieldElement::canonical(
            self.a.mul(&scale)?,
            self.b.neg().mul(&scale)?,
            norm,
        )
    }

    pub fn div(&self, other: &FieldElement) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// |x|² = |a|² + |b|²·p/(1−p) + 2Re(a·conj(b))·s, again an element of 𝕄.
    /// Its evaluation is real and ≥ 0 on (0,1).
    pub fn mod_squared(&self) -> Result<Self> {
        self.mul(&self.conj())
    }

    /// Evaluation homomorphism with the positive real branch of s. Defined
    /// wherever the denominator is nonzero and the s-part stays finite; the
    /// guaranteed domain is p strictly inside (0,1).
    pub fn eval(&self, p: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0,1]")));
        }
        if p >= 1.0 && !self.b.is_zero() {
            return Err(Error::Pole(p));
        }
        let den = self.den.eval(p);
        if den.norm() < 1e-10 {
            return Err(Error::Pole(p));
        }
        let s = if self.b.is_zero() {
            0.0
        } else {
            (p / (1.0 - p)).sqrt()
        };
        Ok((self.a.eval(p) + self.b.eval(p) * s) / den)
    }

    /// Structural equality of canonical parts within `tol`.
    pub fn approx_eq(&self, other: &FieldElement, tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        fn poly_close(x: &Poly, y: &Poly, tol: f64) -> bool {
            let n = x.coeffs().len().max(y.coeffs().len());
            (0..n).all(|i| {
                let a = x.coeffs().get(i).copied().unwrap_or(Complex64::ZERO);
                let b = y.coeffs().get(i).copied().unwrap_or(Complex64::ZERO);
                (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
            })
        }
        poly_close(&self.a, &other.a, tol)
            && poly_close(&self.b, &other.b, tol)
            && poly_close(&self.den, &other.den, tol)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.b.is_zero() {
            return write!(f, "{}", self.rational_part());
        }
        if self.a.is_zero() {
            return write!(f, "({})*s", self.s_part());
        }
        write!(f, "{} + ({})*s", self.rational_part(), self.s_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 2p − 1 as a field element.
    fn two_p_minus_one() -> FieldElement {
        FieldElement::from_rational(
            RationalFn::from_poly(Poly::from_real(&[-1.0, 2.0]).unwrap()),
        )
    }

    #[test]
    fn s_plus_minus_s_is_zero() {
        let s = FieldElement::s();
        assert!(s.add(&s.neg()).unwrap().is_zero());
    }

    #[test]
    fn one_plus_s_at_point_two() {
        // s(0.2) = sqrt(0.25) = 0.5
        let x = FieldElement::one().add(&FieldElement::s()).unwrap();
        assert!((x.eval(0.2).unwrap() - c(1.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_add_matches_reported_sum() {
        let h1 = FieldElement::from_real(-5.347);
        let h2 = FieldElement::from_real(-3.168);
        let sum = h1.add(&h2).unwrap();
        assert!((sum.eval(0.5).unwrap() - c(-8.515, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn s_squared_is_p_over_one_minus_p() {
        let s = FieldElement::s();
        let sq = s.mul(&s).unwrap();
        assert!((sq.eval(0.5).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        // s·s minus p/(1−p) reduces to the zero element
        let sigma = FieldElement::from_polys(Poly::var(), Poly::zero(), one_minus_p()).unwrap();
        assert!(sq.sub(&sigma).unwrap().is_zero());
    }

    #[test]
    fn product_of_conjugate_pair() {
        // (1+s)(1−s) = 1 − p/(1−p) = (1−2p)/(1−p); at p=0.25 this is 2/3
        let one = FieldElement::one();
        let s = FieldElement::s();
        let prod = one.add(&s).unwrap().mul(&one.sub(&s).unwrap()).unwrap();
        assert!((prod.eval(0.25).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_mul_matches_reported_product() {
        let h1 = FieldElement::from_real(0.080);
        let h2 = FieldElement::from_real(0.830);
        let prod = h1.mul(&h2).unwrap();
        assert!((prod.eval(0.3).unwrap() - c(0.0664, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_of_unit_and_s() {
        assert!(FieldElement::one()
            .inv()
            .unwrap()
            .approx_eq(&FieldElement::one(), 1e-12));
        // 1/s at p=0.2 is 2
        let inv_s = FieldElement::s().inv().unwrap();
        assert!((inv_s.eval(0.2).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_of_zero_rejected() {
        assert!(matches!(
            FieldElement::zero().inv(),
            Err(Error::ZeroInverse)
        ));
    }

    #[test]
    fn eval_examples() {
        let s = FieldElement::s();
        assert!((s.eval(0.5).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((two_p_minus_one().eval(0.2).unwrap() - c(-0.6, 0.0)).norm() < 1e-12);
        let sq = s.mul(&s).unwrap();
        assert!((sq.eval(0.25).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mod_squared_examples() {
        let s = FieldElement::s();
        let ms = s.mod_squared().unwrap();
        // |s|² = p/(1−p)
        assert!((ms.eval(0.2).unwrap() - c(0.25, 0.0)).norm() < 1e-12);
        assert!((two_p_minus_one().mod_squared().unwrap().eval(0.2).unwrap() - c(0.36, 0.0))
            .norm()
            < 1e-12);
        // |i·s|² at p = 1/2 is 1
        let is = FieldElement::from_complex(c(0.0, 1.0)).mul(&s).unwrap();
        assert!((is.mod_squared().unwrap().eval(0.5).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eval_at_boundary_zero_is_finite() {
        // s(0) = 0, so a + b·s evaluates to a(0) there
        let x = FieldElement::one().add(&FieldElement::s()).unwrap();
        assert!((x.eval(0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(x.eval(1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn inverse_chains_return_to_the_element() {
        let x = FieldElement::new(
            RationalFn::new(
                Poly::from_real(&[1.0, -2.0, 3.0]).unwrap(),
                Poly::from_real(&[2.0, 1.0]).unwrap(),
            )
            .unwrap(),
            RationalFn::new(
                Poly::from_real(&[3.0, 2.0, -3.0, -2.0]).unwrap(),
                Poly::from_real(&[6.0, -5.0, 1.0]).unwrap(),
            )
            .unwrap(),
        );
        let twice = x.inv().unwrap().inv().unwrap();
        let mut four = x.clone();
        for _ in 0..4 {
            four = four.inv().unwrap();
        }
        for p in [0.1, 0.5, 0.9431058033339956] {
            let a = x.eval(p).unwrap();
            assert!(
                (twice.eval(p).unwrap() - a).norm() <= 1e-9 * (1.0 + a.norm()),
                "double inverse at p={p}"
            );
            assert!(
                (four.eval(p).unwrap() - a).norm() <= 1e-7 * (1.0 + a.norm()),
                "fourfold inverse at p={p}"
            );
        }
    }
}
