//! Dense univariate polynomials in p with complex coefficients.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum degree a polynomial may reach through arithmetic. All circuits of
/// practical size stay far below this.
pub const DEGREE_CAP: usize = 64;

/// Coefficients with magnitude below this are treated as zero.
pub const COEFF_EPS: f64 = 1e-12;

/// A polynomial in p, stored dense in ascending degree. Trailing (near-)zero
/// coefficients are trimmed, so the zero polynomial has an empty coefficient
/// vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Poly { coeffs: vec![c] }.trimmed()
    }

    /// The variable p itself.
    pub fn var() -> Self {
        Poly {
            coeffs: vec![Complex64::ZERO, Complex64::new(1.0, 0.0)],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        let p = Poly { coeffs }.trimmed();
        p.check_cap()?;
        Ok(p)
    }

    /// Real coefficients, ascending degree.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Poly::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap_or(&Complex64::ZERO)
    }

    fn check_cap(&self) -> Result<()> {
        match self.degree() {
            Some(d) if d > DEGREE_CAP => Err(Error::DegreeCap {
                degree: d,
                cap: DEGREE_CAP,
            }),
            _ => Ok(()),
        }
    }

    fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn trimmed(mut self) -> Self {
        let scale = self.max_coeff_norm();
        let tol = COEFF_EPS * (1.0 + scale);
        while let Some(c) = self.coeffs.last() {
            if c.norm() < tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Coefficient-wise complex conjugate. For real p this conjugates the
    /// polynomial's values.
    pub fn conj(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
        .trimmed()
    }

    pub fn add(&self, other: &Poly) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::ZERO; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        let p = Poly { coeffs }.trimmed();
        p.check_cap()?;
        Ok(p)
    }

    pub fn sub(&self, other: &Poly) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        if n - 1 > DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree: n - 1,
                cap: DEGREE_CAP,
            });
        }
        let mut coeffs = vec![Complex64::ZERO; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Poly { coeffs }.trimmed())
    }

    /// Horner evaluation.
    pub fn eval(&self, p: f64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * p + c;
        }
        acc
    }

    /// Leading coefficient scaled to 1. Zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(Complex64::new(1.0, 0.0) / self.leading())
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let Some(nd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Complex64::ZERO; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[dd + k] / lead;
            quo[k] = c;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
        }
        rem.truncate(dd);
        (Poly { coeffs: quo }.trimmed(), Poly { coeffs: rem }.trimmed())
    }

    /// Monic gcd via the Euclidean algorithm, with every iterate checked
    /// eagerly as a candidate: the first (largest-degree) iterate that
    /// divides both inputs within tolerance is the gcd. This terminates at
    /// the true common factor even when float noise keeps the Euclidean
    /// remainders from reaching exact zero, and it can only ever return a
    /// verified divisor — a wrong factor would leave remainders on the
    /// order of the inputs themselves. With no verified candidate the
    /// result is 1: skipping a cancellation keeps fractions unreduced but
    /// correct, while a false cancellation would corrupt values outright.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = self.monic();
        let mut b = other.monic();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            if self.divisible_by(&b, 1e-12) && other.divisible_by(&b, 1e-12) {
                return b;
            }
            let (_, r) = a.divrem(&b);
            // coefficients tiny relative to the monic operands are noise
            let r = r.drop_noise(1e-10);
            a = b;
            b = r.monic();
        }
        Poly::one()
    }

    fn divisible_by(&self, divisor: &Poly, tol: f64) -> bool {
        let (q, r) = self.divrem(divisor);
        // legitimate float residue scales with the reconstruction q·divisor,
        // which can cancel down to a much smaller input
        let scale = self
            .max_coeff_norm()
            .max(q.max_coeff_norm() * divisor.max_coeff_norm())
            .max(1e-300);
        r.max_coeff_norm() <= tol * scale
    }

    fn drop_noise(&self, tol: f64) -> Poly {
        let scale = self.max_coeff_norm();
        if scale < tol {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.norm() < tol * scale { Complex64::ZERO } else { *c })
            .collect();
        Poly { coeffs }.trimmed()
    }

    /// Divides by (p − z) as many times as the remainder stays negligible;
    /// returns the quotient and the number of factors removed (at most
    /// `max_power`).
    pub fn strip_root(&self, z: f64, max_power: usize) -> (Poly, usize) {
        let mut cur = self.clone();
        let mut removed = 0;
        let linear = Poly {
            coeffs: vec![Complex64::new(-z, 0.0), Complex64::new(1.0, 0.0)],
        };
        while removed < max_power && !cur.is_zero() {
            let (q, r) = cur.divrem(&linear);
            let scale = cur.max_coeff_norm().max(1e-300);
            if r.max_coeff_norm() <= 1e-9 * scale {
                cur = q;
                removed += 1;
            } else {
                break;
            }
        }
        (cur, removed)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() < COEFF_EPS {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.im.abs() < COEFF_EPS {
                format!("{}", c.re)
            } else if c.re.abs() < COEFF_EPS {
                format!("{}i", c.im)
            } else {
                format!("({}{:+}i)", c.re, c.im)
            };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}*p")?,
                _ => write!(f, "{coeff}*p^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
