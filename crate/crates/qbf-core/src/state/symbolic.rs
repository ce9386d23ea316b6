//! States with relative amplitudes in 𝕄 (normalization deferred).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::state::operator::Operator;
use crate::state::{RelAmp, StateVector, MAX_QUBITS};

/// An n-qubit state whose amplitudes are field elements, stored up to an
/// overall scale. Post-selection drops branches without renormalizing.
#[derive(Clone, Debug)]
pub struct SymbolicState {
    n_qubits: usize,
    amps: Vec<FieldElement>,
}

impl SymbolicState {
    pub fn from_amps(n_qubits: usize, amps: Vec<FieldElement>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCap {
                qubits: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                n_qubits
            )));
        }
        Ok(SymbolicState { n_qubits, amps })
    }

    /// The quoin in relative form: s|0⟩ + |1⟩.
    pub fn quoin() -> Self {
        SymbolicState {
            n_qubits: 1,
            amps: vec![FieldElement::s(), FieldElement::one()],
        }
    }

    /// α|0⟩ + |1⟩, or |0⟩ for the ∞ marker.
    pub fn constant(alpha: RelAmp) -> Self {
        let amps = match alpha {
            RelAmp::Infinity => vec![FieldElement::one(), FieldElement::zero()],
            RelAmp::Finite(a) => vec![FieldElement::from_complex(a), FieldElement::one()],
        };
        SymbolicState { n_qubits: 1, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![FieldElement::zero(); 1 << n_qubits];
        amps[index] = FieldElement::one();
        SymbolicState::from_amps(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[FieldElement] {
        &self.amps
    }

    pub fn tensor(&self, other: &SymbolicState) -> Result<SymbolicState> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCap {
                qubits: n,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a.mul(b)?);
            }
        }
        SymbolicState::from_amps(n, amps)
    }

    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<SymbolicState> {
        if targets.len() != op.qubits() {
            return Err(Error::DimensionMismatch(format!(
                "operator {} acts on {} qubits, got {} targets",
                op.name(),
                op.qubits(),
                targets.len()
            )));
        }
        let positions: Vec<usize> = targets
            .iter()
            .map(|&t| {
                if t >= self.n_qubits {
                    Err(Error::DimensionMismatch(format!("target qubit {t} out of range")))
                } else {
                    Ok(self.n_qubits - 1 - t)
                }
            })
            .collect::<Result<_>>()?;
        let dim = op.dim();
        let mut out = vec![FieldElement::zero(); self.amps.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut sub = 0usize;
            for (t, pos) in positions.iter().enumerate() {
                sub |= ((i >> pos) & 1) << (op.qubits() - 1 - t);
            }
            let mut acc = FieldElement::zero();
            for j in 0..dim {
                let m = op.entry(sub, j);
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                let mut src = i;
                for (t, pos) in positions.iter().enumerate() {
                    let bit = (j >> (op.qubits() - 1 - t)) & 1;
                    src = (src & !(1 << pos)) | (bit << pos);
                }
                acc = acc.add(&self.amps[src].scale(m))?;
            }
            *slot = acc;
        }
        SymbolicState::from_amps(self.n_qubits, out)
    }

    pub fn swap_amps(&self, i: usize, j: usize) -> SymbolicState {
        let mut amps = self.amps.clone();
        amps.swap(i, j);
        SymbolicState {
            n_qubits: self.n_qubits,
            amps,
        }
    }

    pub fn rotate_pair(&self, i: usize, j: usize) -> SymbolicState {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = self.amps.clone();
        let x = amps[i].clone();
        let y = amps[j].clone();
        amps[i] = x.sub(&y).expect("field op").scale(h);
        amps[j] = x.add(&y).expect("field op").scale(h);
        SymbolicState {
            n_qubits: self.n_qubits,
            amps,
        }
    }

    /// Keeps the branch with `qubit = outcome`. Errors only if the branch is
    /// identically zero.
    pub fn postselect(&self, qubit: usize, outcome: u8) -> Result<SymbolicState> {
        if qubit >= self.n_qubits || self.n_qubits == 1 {
            return Err(Error::DimensionMismatch(format!(
                "cannot post-select qubit {qubit} of a {}-qubit state",
                self.n_qubits
            )));
        }
        let pos = self.n_qubits - 1 - qubit;
        let branch: Vec<FieldElement> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i >> pos) & 1) as u8 == outcome)
            .map(|(_, a)| a.clone())
            .collect();
        if branch.iter().all(|a| a.is_zero()) {
            return Err(Error::ZeroBranch { qubit, outcome });
        }
        SymbolicState::from_amps(self.n_qubits - 1, branch)
    }

    /// Relative amplitude k₀(p)/k₁(p) of a single-qubit state evaluated at
    /// p, as a plain complex ratio. Evaluating the parts before dividing
    /// sidesteps the conditioning loss a symbolic division can pick up near
    /// representation poles.
    pub fn rel_amp_at(&self, p: f64) -> Result<Complex64> {
        if self.n_qubits != 1 {
            return Err(Error::DimensionMismatch(
                "relative amplitude of a multi-qubit state".into(),
            ));
        }
        let k1 = self.amps[1].eval(p)?;
        if k1.norm() < 1e-14 {
            return Err(Error::DegenerateInput(format!(
                "relative amplitude diverges at p = {p}"
            )));
        }
        Ok(self.amps[0].eval(p)? / k1)
    }

    /// h = k₀/k₁ of a single-qubit state; errors on the ∞ marker.
    pub fn relative_amplitude(&self) -> Result<FieldElement> {
        if self.n_qubits != 1 {
            return Err(Error::DimensionMismatch(
                "relative amplitude of a multi-qubit state".into(),
            ));
        }
        if self.amps[1].is_zero() {
            return Err(Error::DegenerateInput(
                "relative amplitude is the infinity marker".into(),
            ));
        }
        self.amps[0].div(&self.amps[1])
    }

    /// Evaluates every amplitude at p; the result is unnormalized.
    pub fn eval(&self, p: f64) -> Result<Vec<Complex64>> {
        self.amps.iter().map(|a| a.eval(p)).collect()
    }

    /// Numeric snapshot at p: evaluated, normalized, success probability 1.
    pub fn to_numeric(&self, p: f64) -> Result<StateVector> {
        let amps = self.eval(p)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::Domain(format!("symbolic state vanishes at p = {p}")));
        }
        StateVector::from_amps(self.n_qubits, amps.iter().map(|a| a / norm).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoin_matches_numeric_up_to_scale() {
        let sym = SymbolicState::quoin();
        let p = 0.3;
        let num = sym.to_numeric(p).unwrap();
        let direct = StateVector::quoin(p).unwrap();
        assert!(num.approx_eq_up_to_phase(&direct, 1e-12));
    }

    #[test]
    fn symbolic_cnot_tracks_field_amplitudes() {
        let q = SymbolicState::quoin();
        let st = q
            .tensor(&q)
            .unwrap()
            .apply(&Operator::cnot(), &[0, 1])
            .unwrap();
        // relative amps (s², s, 1, s): |11⟩ slot carries s after the flip
        let at = |i: usize, p: f64| st.amps()[i].eval(p).unwrap();
        let s = (0.2f64 / 0.8).sqrt();
        assert!((at(0, 0.2) - s * s).norm() < 1e-12);
        assert!((at(3, 0.2) - s).norm() < 1e-12);
    }

    #[test]
    fn postselect_keeps_branch() {
        let q = SymbolicState::quoin();
        let joint = q.tensor(&SymbolicState::basis(1, 0).unwrap()).unwrap();
        let kept = joint.postselect(1, 0).unwrap();
        assert_eq!(kept.n_qubits(), 1);
        assert!(kept.amps()[0].approx_eq(&FieldElement::s(), 1e-12));
    }
}
