//! Coin functions q(p) = Σ_ℍ|h_j|² / Σ_𝔹|h_i|² built from Bernoulli states,
//! their evaluation, and the acceptance-probability surfaces of the basic
//! operations.

pub mod extend;
pub mod feasibility;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, Poly, RationalFn};
use crate::state::{Operator, RelAmp, SymbolicState};

pub use extend::extend_common_zeros;
pub use feasibility::{cbf_check, spb_check, CbfVerdict, CheckStatus, SpbVerdict, VanishingPoint};

/// A ratio in cleared form: numerator A_N(p) + B_N(p)·w and denominator
/// A_D(p) + B_D(p)·w with w = √(p(1−p)) and all four parts polynomials.
/// Both sides carry the same clearing multiplier, so the ratio is unchanged
/// and evaluation is pole-free on all of [0,1] away from true common zeros.
#[derive(Clone, Debug)]
pub(crate) struct ClearedRatio {
    pub a_n: Poly,
    pub b_n: Poly,
    pub a_d: Poly,
    pub b_d: Poly,
}

impl ClearedRatio {
    /// Clears the shared denominators (and one (1−p) from the s → w
    /// conversion) out of num = (A₁ + B₁s)/C₁ over den = (A₂ + B₂s)/C₂.
    pub fn from_elements(num: &FieldElement, den: &FieldElement) -> Result<Self> {
        let (na, nb, nc) = num.parts();
        let (da, db, dc) = den.parts();
        let has_s = !nb.is_zero() || !db.is_zero();
        let one_minus_p = Poly::from_real(&[1.0, -1.0])?;
        let mut a_n = na.mul(dc)?;
        let b_n = nb.mul(dc)?;
        let mut a_d = da.mul(nc)?;
        let b_d = db.mul(nc)?;
        let mut multiplier = nc.mul(dc)?;
        if has_s {
            a_n = a_n.mul(&one_minus_p)?;
            a_d = a_d.mul(&one_minus_p)?;
            multiplier = multiplier.mul(&one_minus_p)?;
        }
        Ok(ClearedRatio { a_n, b_n, a_d, b_d }.reduced(&multiplier))
    }

    /// Cancels the part of the four-way gcd that divides the clearing
    /// multiplier: those factors are pole artifacts of the relative-
    /// amplitude representation, not zeros the coin actually has, and left
    /// in place they would read as spurious singularities (e.g. at p = 1).
    /// Zeros genuinely shared by numerator and denominator do not divide
    /// the multiplier and survive for [`extend_common_zeros`] to handle.
    fn reduced(self, multiplier: &Poly) -> Self {
        let mut g = Poly::zero();
        for part in [&self.a_n, &self.b_n, &self.a_d, &self.b_d] {
            if !part.is_zero() {
                g = g.gcd(part);
            }
        }
        let cancel = g.gcd(multiplier);
        if cancel.degree().unwrap_or(0) == 0 {
            return self;
        }
        let div = |p: &Poly| -> Poly {
            if p.is_zero() {
                Poly::zero()
            } else {
                p.divrem(&cancel).0
            }
        };
        ClearedRatio {
            a_n: div(&self.a_n),
            b_n: div(&self.b_n),
            a_d: div(&self.a_d),
            b_d: div(&self.b_d),
        }
    }

    pub fn num_at(&self, p: f64) -> Complex64 {
        let w = (p * (1.0 - p)).max(0.0).sqrt();
        self.a_n.eval(p) + self.b_n.eval(p) * w
    }

    pub fn den_at(&self, p: f64) -> Complex64 {
        let w = (p * (1.0 - p)).max(0.0).sqrt();
        self.a_d.eval(p) + self.b_d.eval(p) * w
    }
}

/// A coin function as a ratio of two real-valued elements of 𝕄, kept with
/// the basis sets it came from. Directly defined coins (no originating
/// state) carry empty basis sets.
#[derive(Clone, Debug)]
pub struct CoinFunction {
    numerator: FieldElement,
    denominator: FieldElement,
    cleared: ClearedRatio,
    basis_all: Vec<usize>,
    basis_head: Vec<usize>,
    domain: (f64, f64),
}

impl CoinFunction {
    /// Assembles q(p) from a symbolic state: numerator Σ_ℍ|h_j|²,
    /// denominator Σ_𝔹|h_i|².
    pub fn from_state(
        state: &SymbolicState,
        basis_all: &[usize],
        basis_head: &[usize],
    ) -> Result<Self> {
        if basis_all.is_empty() || basis_head.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if !basis_head.iter().all(|h| basis_all.contains(h)) {
            return Err(Error::Domain("head set must be a subset of the basis set".into()));
        }
        let sum_sq = |set: &[usize]| -> Result<FieldElement> {
            let mut acc = FieldElement::zero();
            for &i in set {
                let amp = state.amps().get(i).ok_or_else(|| {
                    Error::DimensionMismatch(format!("basis index {i} out of range"))
                })?;
                acc = acc.add(&amp.mod_squared()?)?;
            }
            Ok(acc)
        };
        let numerator = sum_sq(basis_head)?;
        let denominator = sum_sq(basis_all)?;
        if denominator.is_zero() {
            return Err(Error::Domain("coin denominator is identically zero".into()));
        }
        Ok(CoinFunction {
            cleared: ClearedRatio::from_elements(&numerator, &denominator)?,
            numerator,
            denominator,
            basis_all: basis_all.to_vec(),
            basis_head: basis_head.to_vec(),
            domain: (0.0, 1.0),
        })
    }

    /// A coin given directly as a ratio of field elements.
    pub fn from_parts(
        numerator: FieldElement,
        denominator: FieldElement,
        domain: (f64, f64),
    ) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Domain("coin denominator is identically zero".into()));
        }
        if !(0.0..=1.0).contains(&domain.0) || !(domain.0..=1.0).contains(&domain.1) {
            return Err(Error::Domain(format!("bad coin domain {domain:?}")));
        }
        Ok(CoinFunction {
            cleared: ClearedRatio::from_elements(&numerator, &denominator)?,
            numerator,
            denominator,
            basis_all: Vec::new(),
            basis_head: Vec::new(),
            domain,
        })
    }

    pub(crate) fn cleared(&self) -> &ClearedRatio {
        &self.cleared
    }

    pub(crate) fn with_parts_and_bases(
        numerator: FieldElement,
        denominator: FieldElement,
        basis_all: Vec<usize>,
        basis_head: Vec<usize>,
        domain: (f64, f64),
    ) -> Result<Self> {
        Ok(CoinFunction {
            cleared: ClearedRatio::from_elements(&numerator, &denominator)?,
            numerator,
            denominator,
            basis_all,
            basis_head,
            domain,
        })
    }

    pub fn numerator(&self) -> &FieldElement {
        &self.numerator
    }

    pub fn denominator(&self) -> &FieldElement {
        &self.denominator
    }

    pub fn basis_all(&self) -> &[usize] {
        &self.basis_all
    }

    pub fn basis_head(&self) -> &[usize] {
        &self.basis_head
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Evaluates the ratio at p via the cleared form, which is pole-free on
    /// [0,1]. A vanishing denominator is a singularity error naming p; use
    /// [`extend_common_zeros`] first when the zero is shared with the
    /// numerator.
    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(self.domain.0..=self.domain.1).contains(&p) {
            return Err(Error::Domain(format!(
                "p = {p} outside coin domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        let num = self.cleared.num_at(p);
        let den = self.cleared.den_at(p);
        if den.norm() < 1e-13 * (1.0 + num.norm()) {
            return Err(Error::Singularity(p));
        }
        let v = (num / den).re;
        // shave float dust at the range edges
        if (-1e-9..0.0).contains(&v) {
            Ok(0.0)
        } else if (1.0..1.0 + 1e-9).contains(&v) {
            Ok(1.0)
        } else {
            Ok(v)
        }
    }
}

/// Evaluation entry point mirroring the coin's method.
pub fn eval_coin(f: &CoinFunction, p: f64) -> Result<f64> {
    f.eval(p)
}

/// f_a(p) = |√(a(1−p)) − √(p(1−a))|², the coin family of the type-1
/// factory; vanishes exactly at p = a.
pub fn f_a_eval(a: f64, p: f64) -> f64 {
    let d = (a * (1.0 - p)).sqrt() - (p * (1.0 - a)).sqrt();
    d * d
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Multiply,
    Add,
}

/// Closed-form per-attempt acceptance of the photonic multiply/add circuits,
/// with ∞ markers handled by their limits. Maxima: 1/8 for multiply (at
/// |h₁| = |h₂| = 0 or ∞), 1/12 for add (at h₁ = h₂ = ±√2/2).
pub fn success_prob_surface(kind: SurfaceKind, h1: RelAmp, h2: RelAmp) -> f64 {
    match kind {
        SurfaceKind::Multiply => match (h1.value(), h2.value()) {
            (Some(a), Some(b)) => {
                ((a * b).norm_sqr() + 1.0) / (8.0 * (a.norm_sqr() + 1.0) * (b.norm_sqr() + 1.0))
            }
            (None, Some(b)) => b.norm_sqr() / (8.0 * (b.norm_sqr() + 1.0)),
            (Some(a), None) => a.norm_sqr() / (8.0 * (a.norm_sqr() + 1.0)),
            (None, None) => 0.125,
        },
        SurfaceKind::Add => match (h1.value(), h2.value()) {
            (Some(a), Some(b)) => {
                ((a + b).norm_sqr() + 1.0) / (16.0 * (a.norm_sqr() + 1.0) * (b.norm_sqr() + 1.0))
            }
            (None, Some(b)) => 1.0 / (16.0 * (b.norm_sqr() + 1.0)),
            (Some(a), None) => 1.0 / (16.0 * (a.norm_sqr() + 1.0)),
            (None, None) => 0.0,
        },
    }
}

/// f_c(p) = (2p−1)²/(1+(2p−1)²) from the example-coin state.
pub fn example_coin_function() -> Result<CoinFunction> {
    let state = crate::constructor::circuits::example_coin_plan().run_symbolic()?;
    CoinFunction::from_state(&state, &[0, 1], &[0])
}

/// g(p) = 4p(1−p) via the σ_z measurement of the g state (protocol 2).
pub fn g2_coin_function() -> Result<CoinFunction> {
    let state = crate::constructor::circuits::g_state_plan().run_symbolic()?;
    CoinFunction::from_state(&state, &[0, 1], &[0])
}

/// g(p) = 4p(1−p) via the conditioned joint measurement (protocol 3):
/// 𝔹 = {|01⟩, |10⟩}, ℍ = {|01⟩}.
pub fn g3_coin_function() -> Result<CoinFunction> {
    let state = crate::constructor::circuits::g_joint_plan().run_symbolic()?;
    CoinFunction::from_state(&state, &[0b01, 0b10], &[0b01])
}

/// f_a as a coin function, from U_a applied to a symbolic quoin with
/// ℍ = {|1⟩}.
pub fn fa_coin_function(a: f64) -> Result<CoinFunction> {
    let state = SymbolicState::quoin().apply(&Operator::u_a(a)?, &[0])?;
    CoinFunction::from_state(&state, &[0, 1], &[1])
}

/// The Bernoulli doubling function f_∧(p) = 2p on [0, 1/2].
pub fn doubling_coin_function() -> Result<CoinFunction> {
    CoinFunction::from_parts(
        FieldElement::from_rational(RationalFn::from_poly(Poly::from_real(&[0.0, 2.0])?)),
        FieldElement::one(),
        (0.0, 0.5),
    )
}

/// The constant coin.
pub fn constant_coin_function(v: f64) -> Result<CoinFunction> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("constant coin value {v} outside [0,1]")));
    }
    CoinFunction::from_parts(FieldElement::from_real(v), FieldElement::one(), (0.0, 1.0))
}

/// The four-basis state whose post-selected coin has a removable common
/// zero at p = 1/2:
/// (1−2p)|0⟩ + (1−2p)²(1−3p)|1⟩ + (1−2p)(1−4p)²|2⟩ + |3⟩,
/// measured with 𝔹 = {0,1,2}, ℍ = {0,1}.
pub fn shared_zero_example() -> Result<CoinFunction> {
    let poly = |c: &[f64]| -> Result<FieldElement> {
        Ok(FieldElement::from_rational(RationalFn::from_poly(
            Poly::from_real(c)?,
        )))
    };
    let one_minus_2p = poly(&[1.0, -2.0])?;
    let one_minus_3p = poly(&[1.0, -3.0])?;
    let one_minus_4p = poly(&[1.0, -4.0])?;
    let amp0 = one_minus_2p.clone();
    let amp1 = one_minus_2p
        .mul(&one_minus_2p)?
        .mul(&one_minus_3p)?;
    let amp2 = one_minus_2p.mul(&one_minus_4p.mul(&one_minus_4p)?)?;
    let state = SymbolicState::from_amps(2, vec![amp0, amp1, amp2, FieldElement::one()])?;
    CoinFunction::from_state(&state, &[0, 1, 2], &[0, 1])
}

/// Complex helper for tests and callers.
pub fn complex(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
