//! Continuity extension across zeros shared by numerator and denominator.
//!
//! Works on the cleared form A(p) + B(p)·w, w = √(p(1−p)): shared zeros are
//! detected numerically on [0,1], but the factors carrying them are divided
//! out exactly as the polynomial gcd of the numerator parts against the
//! denominator parts (root refinement alone would limit the extension to
//! ~1e−7 accuracy). When the shared zero is not visible part-wise, both
//! sides are first multiplied by the denominator's conjugate A_D − B_D·w,
//! which makes the denominator a plain polynomial, and the gcd pass runs
//! again.

use crate::error::{Error, Result};
use crate::field::{FieldElement, Poly};

use super::feasibility::locate_vanishing;
use super::{ClearedRatio, CoinFunction};

/// Returns an equivalent coin function whose numerator and denominator share
/// no zero on the domain, so formerly singular points evaluate to the
/// continuous extension. A coin without common zeros is returned unchanged.
pub fn extend_common_zeros(f: &CoinFunction) -> Result<CoinFunction> {
    let (lo, hi) = f.domain();
    let mut cleared = f.cleared().clone();

    if common_zeros(&cleared, lo, hi)?.is_empty() {
        return Ok(f.clone());
    }

    for round in 0..4 {
        let g = shared_gcd(&cleared);
        if g.degree().unwrap_or(0) > 0 {
            divide_all(&mut cleared, &g);
        }
        if common_zeros(&cleared, lo, hi)?.is_empty() {
            return rebuild(f, &cleared);
        }
        if round == 3 {
            break;
        }
        cleared = conjugated(&cleared)?;
    }
    Err(Error::Domain(
        "common zeros remain after the extension passes".into(),
    ))
}

/// Zeros of the denominator where the numerator also vanishes.
fn common_zeros(c: &ClearedRatio, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let den_scale = scale_of(c, false, lo, hi).max(1e-300);
    let num_scale = scale_of(c, true, lo, hi).max(1e-300);
    let den_fn = |p: f64| -> Result<f64> { Ok(c.den_at(p).norm() / den_scale) };
    let zeros = locate_vanishing(&den_fn, lo, hi)?;
    Ok(zeros
        .into_iter()
        .filter(|&z| c.num_at(z).norm() / num_scale < 1e-8)
        .collect())
}

fn scale_of(c: &ClearedRatio, num: bool, lo: f64, hi: f64) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=100 {
        let p = lo + (hi - lo) * (i as f64 / 100.0);
        let v = if num { c.num_at(p) } else { c.den_at(p) };
        best = best.max(v.norm());
    }
    best
}

/// Gcd of the numerator side against the denominator side, each taken over
/// its nonzero parts. An identically-zero side leaves the other side's gcd
/// in charge.
fn shared_gcd(c: &ClearedRatio) -> Poly {
    let side = |a: &Poly, b: &Poly| -> Option<Poly> {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => None,
            (false, true) => Some(a.monic()),
            (true, false) => Some(b.monic()),
            (false, false) => Some(a.gcd(b)),
        }
    };
    let num = side(&c.a_n, &c.b_n);
    let den = side(&c.a_d, &c.b_d);
    match (num, den) {
        (Some(n), Some(d)) => n.gcd(&d),
        (None, Some(d)) => d,
        (Some(n), None) => n,
        (None, None) => Poly::one(),
    }
}

fn divide_all(c: &mut ClearedRatio, g: &Poly) {
    for part in [&mut c.a_n, &mut c.b_n, &mut c.a_d, &mut c.b_d] {
        if !part.is_zero() {
            *part = part.divrem(g).0;
        }
    }
}

/// Multiplies numerator and denominator by A_D − B_D·w, turning the
/// denominator into a pure polynomial: (A_D + B_D w)(A_D − B_D w) =
/// A_D² − B_D²·p(1−p).
fn conjugated(c: &ClearedRatio) -> Result<ClearedRatio> {
    let w_sq = Poly::from_real(&[0.0, 1.0, -1.0])?; // p(1−p)
    let a_n = c.a_n.mul(&c.a_d)?.sub(&c.b_n.mul(&c.b_d)?.mul(&w_sq)?)?;
    let b_n = c.b_n.mul(&c.a_d)?.sub(&c.a_n.mul(&c.b_d)?)?;
    let a_d = c.a_d.mul(&c.a_d)?.sub(&c.b_d.mul(&c.b_d)?.mul(&w_sq)?)?;
    Ok(ClearedRatio {
        a_n,
        b_n,
        a_d,
        b_d: Poly::zero(),
    })
}

/// Rebuilds field elements from the cleared parts: A + B·w = A + B·(1−p)·s.
fn rebuild(f: &CoinFunction, c: &ClearedRatio) -> Result<CoinFunction> {
    let one_minus_p = Poly::from_real(&[1.0, -1.0])?;
    let elem = |a: &Poly, b: &Poly| -> Result<FieldElement> {
        FieldElement::from_polys(a.clone(), b.mul(&one_minus_p)?, Poly::one())
    };
    CoinFunction::with_parts_and_bases(
        elem(&c.a_n, &c.b_n)?,
        elem(&c.a_d, &c.b_d)?,
        f.basis_all().to_vec(),
        f.basis_head().to_vec(),
        f.domain(),
    )
}
