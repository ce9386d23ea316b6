//! Rational functions of p in canonical form: monic denominator, common
//! ℂ[p]-factors removed.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        Ok(RationalFn { num, den }.reduced())
    }

    pub fn zero() -> Self {
        RationalFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFn {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        RationalFn {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }

    /// The variable p.
    pub fn var() -> Self {
        RationalFn::from_poly(Poly::var())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduced(self) -> Self {
        if self.num.is_zero() {
            return RationalFn::zero();
        }
        let g = self.num.gcd(&self.den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (self.num.divrem(&g).0, self.den.divrem(&g).0)
        } else {
            (self.num, self.den)
        };
        // Monic denominator fixes the scale of both parts.
        let lead = den.leading();
        RationalFn {
            num: num.scale(Complex64::new(1.0, 0.0) / lead),
            den: den.scale(Complex64::new(1.0, 0.0) / lead),
        }
    }

    pub fn neg(&self) -> Self {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        RationalFn {
            num: self.num.conj(),
            den: self.den.conj(),
        }
        .reduced()
    }

    pub fn add(&self, other: &RationalFn) -> Result<Self> {
        let num = self
            .num
            .mul(&other.den)?
            .add(&other.num.mul(&self.den)?)?;
        let den = self.den.mul(&other.den)?;
        RationalFn::new(num, den)
    }

    pub fn sub(&self, other: &RationalFn) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFn) -> Result<Self> {
        // Cross-cancel before multiplying to keep degrees down.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (n1, d2) = if g1.degree().unwrap_or(0) > 0 {
            (self.num.divrem(&g1).0, other.den.divrem(&g1).0)
        } else {
            (self.num.clone(), other.den.clone())
        };
        let (n2, d1) = if g2.degree().unwrap_or(0) > 0 {
            (other.num.divrem(&g2).0, self.den.divrem(&g2).0)
        } else {
            (other.num.clone(), self.den.clone())
        };
        RationalFn::new(n1.mul(&n2)?, d1.mul(&d2)?)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn eval(&self, p: f64) -> Result<Complex64> {
        let d = self.den.eval(p);
        if d.norm() < 1e-10 {
            return Err(Error::Pole(p));
        }
        Ok(self.num.eval(p) / d)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) || self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
