//! Dense n-qubit state vectors with post-selection bookkeeping.
//!
//! Numeric states carry complex amplitudes at a fixed p together with the
//! cumulative post-selection success probability; symbolic states carry
//! relative [`FieldElement`](crate::field::FieldElement) amplitudes with
//! normalization deferred. Qubit 0 is the most significant bit of a basis
//! index, so |01⟩ of a 2-qubit state is index 1.
//!
//! States are immutable values: every operation returns a new state. All
//! randomness comes from caller-supplied generators.

pub mod operator;
pub mod symbolic;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use operator::{Operator, PHOTONIC_AMP};
pub use symbolic::SymbolicState;

/// Hard cap on qubit counts; every circuit in scope uses at most 3.
pub const MAX_QUBITS: usize = 12;

/// A relative amplitude h = k₀/k₁ in homogeneous convention: k₁ = 0 is the
/// legitimate value ∞ (the state |0⟩).
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum RelAmp {
    Finite(Complex64),
    Infinity,
}

impl RelAmp {
    pub fn finite(re: f64, im: f64) -> Self {
        RelAmp::Finite(Complex64::new(re, im))
    }

    pub fn from_pair(k0: Complex64, k1: Complex64) -> Self {
        let scale = k0.norm().max(k1.norm());
        if k1.norm() <= 1e-12 * (1.0 + scale) {
            RelAmp::Infinity
        } else {
            RelAmp::Finite(k0 / k1)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RelAmp::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RelAmp::Finite(c) if c.norm() < 1e-12)
    }

    pub fn value(&self) -> Option<Complex64> {
        match self {
            RelAmp::Finite(c) => Some(*c),
            RelAmp::Infinity => None,
        }
    }

    pub fn approx_eq(&self, other: &RelAmp, tol: f64) -> bool {
        match (self, other) {
            (RelAmp::Infinity, RelAmp::Infinity) => true,
            (RelAmp::Finite(a), RelAmp::Finite(b)) => {
                (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
            }
            _ => false,
        }
    }
}

impl fmt::Display for RelAmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelAmp::Infinity => write!(f, "inf"),
            RelAmp::Finite(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

impl Serialize for RelAmp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RelAmp::Infinity => serializer.serialize_str("inf"),
            RelAmp::Finite(c) => [c.re, c.im].serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for RelAmp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Marker(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Marker(s) if s == "inf" => Ok(RelAmp::Infinity),
            Repr::Marker(s) => Err(D::Error::custom(format!("unknown amplitude marker {s}"))),
            Repr::Pair([re, im]) => Ok(RelAmp::finite(re, im)),
        }
    }
}

/// An n-qubit numeric state. Amplitudes are kept normalized except between a
/// non-unitary operator application and the following post-selection, where
/// the missing norm is the pending acceptance probability.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
    success_prob: f64,
    p_value: Option<f64>,
}

impl StateVector {
    pub fn from_amps(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                n_qubits
            )));
        }
        Ok(StateVector {
            n_qubits,
            amps,
            success_prob: 1.0,
            p_value: None,
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector::from_amps(n_qubits, amps)
    }

    /// The quoin |ψ_p⟩ = √p|0⟩ + √(1−p)|1⟩.
    pub fn quoin(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("quoin bias {p} outside [0,1]")));
        }
        let mut st = StateVector::from_amps(
            1,
            vec![
                Complex64::new(p.sqrt(), 0.0),
                Complex64::new((1.0 - p).sqrt(), 0.0),
            ],
        )?;
        st.p_value = Some(p);
        Ok(st)
    }

    /// Normalized state ∝ α|0⟩ + |1⟩; the ∞ marker yields |0⟩.
    pub fn constant(alpha: RelAmp) -> Self {
        match alpha {
            RelAmp::Infinity => StateVector::basis(1, 0).unwrap(),
            RelAmp::Finite(a) => {
                let norm = (a.norm_sqr() + 1.0).sqrt();
                StateVector::from_amps(1, vec![a / norm, Complex64::new(1.0 / norm, 0.0)]).unwrap()
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Cumulative probability that every post-selection so far succeeded.
    pub fn success_prob(&self) -> f64 {
        self.success_prob
    }

    pub fn p_value(&self) -> Option<f64> {
        self.p_value
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        check_qubits(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            n_qubits: n,
            amps,
            success_prob: self.success_prob * other.success_prob,
            p_value: self.p_value.or(other.p_value),
        })
    }

    /// Applies `op` to the listed target qubits (first target = most
    /// significant bit of the operator's index space). Non-unitary operators
    /// leave the state unnormalized pending post-selection.
    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        let positions = self.target_positions(op, targets)?;
        let dim = op.dim();
        let len = self.amps.len();
        let mut out = vec![Complex64::ZERO; len];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut sub = 0usize;
            for (t, pos) in positions.iter().enumerate() {
                sub |= ((i >> pos) & 1) << (op.qubits() - 1 - t);
            }
            let mut acc = Complex64::ZERO;
            for j in 0..dim {
                let m = op.entry(sub, j);
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                // index i with target bits replaced by the bits of j
                let mut src = i;
                for (t, pos) in positions.iter().enumerate() {
                    let bit = (j >> (op.qubits() - 1 - t)) & 1;
                    src = (src & !(1 << pos)) | (bit << pos);
                }
                acc += m * self.amps[src];
            }
            *slot = acc;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
            success_prob: self.success_prob,
            p_value: self.p_value,
        })
    }

    fn target_positions(&self, op: &Operator, targets: &[usize]) -> Result<Vec<usize>> {
        if targets.len() != op.qubits() {
            return Err(Error::DimensionMismatch(format!(
                "operator {} acts on {} qubits, got {} targets",
                op.name(),
                op.qubits(),
                targets.len()
            )));
        }
        let mut seen = vec![false; self.n_qubits];
        let mut positions = Vec::with_capacity(targets.len());
        for &t in targets {
            if t >= self.n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "target qubit {t} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::DimensionMismatch(format!("duplicate target qubit {t}")));
            }
            positions.push(self.n_qubits - 1 - t);
        }
        Ok(positions)
    }

    /// Swaps the amplitudes of two basis states (a two-cycle permutation,
    /// hence unitary).
    pub fn swap_amps(&self, i: usize, j: usize) -> StateVector {
        let mut amps = self.amps.clone();
        amps.swap(i, j);
        StateVector {
            n_qubits: self.n_qubits,
            amps,
            success_prob: self.success_prob,
            p_value: self.p_value,
        }
    }

    /// Applies [[1,−1],[1,1]]/√2 to the amplitude pair (i, j): the Hadamard-
    /// like diagonal block of the add unitary.
    pub fn rotate_pair(&self, i: usize, j: usize) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = self.amps.clone();
        let (x, y) = (amps[i], amps[j]);
        amps[i] = (x - y) * h;
        amps[j] = (x + y) * h;
        StateVector {
            n_qubits: self.n_qubits,
            amps,
            success_prob: self.success_prob,
            p_value: self.p_value,
        }
    }

    /// Collapses `qubit` to `outcome`. Returns the renormalized remaining
    /// state (one fewer qubit) and the branch probability, which also folds
    /// any pending non-unitary attenuation. The cumulative success
    /// probability multiplies.
    pub fn postselect(&self, qubit: usize, outcome: u8) -> Result<(StateVector, f64)> {
        if qubit >= self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "post-selection qubit {qubit} out of range"
            )));
        }
        if self.n_qubits == 1 {
            return Err(Error::DimensionMismatch(
                "cannot post-select away the last qubit".into(),
            ));
        }
        let pos = self.n_qubits - 1 - qubit;
        let mut branch = Vec::with_capacity(self.amps.len() / 2);
        for (i, a) in self.amps.iter().enumerate() {
            if ((i >> pos) & 1) as u8 == outcome {
                branch.push(*a);
            }
        }
        let prob: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
        if prob < 1e-15 {
            return Err(Error::ZeroBranch { qubit, outcome });
        }
        let scale = prob.sqrt();
        for a in &mut branch {
            *a /= scale;
        }
        Ok((
            StateVector {
                n_qubits: self.n_qubits - 1,
                amps: branch,
                success_prob: self.success_prob * prob,
                p_value: self.p_value,
            },
            prob,
        ))
    }

    /// Born probabilities renormalized over a basis subset.
    pub fn born_probs(&self, basis_set: &[usize]) -> Result<BTreeMap<usize, f64>> {
        if basis_set.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let mut probs = BTreeMap::new();
        let mut total = 0.0;
        for &i in basis_set {
            if i >= self.amps.len() {
                return Err(Error::DimensionMismatch(format!("basis index {i} out of range")));
            }
            let p = self.amps[i].norm_sqr();
            total += p;
            probs.insert(i, p);
        }
        if total < 1e-15 {
            return Err(Error::ZeroMass);
        }
        for v in probs.values_mut() {
            *v /= total;
        }
        Ok(probs)
    }

    /// Samples a basis outcome per the Born rule. Deterministic given the
    /// generator state.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = self.norm_sqr();
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return i;
            }
        }
        self.amps.len() - 1
    }

    /// |⟨x|y⟩|² on normalized copies; global phase is irrelevant.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(
                "fidelity of states with different qubit counts".into(),
            ));
        }
        let na = self.norm_sqr();
        let nb = other.norm_sqr();
        if na < 1e-15 || nb < 1e-15 {
            return Err(Error::Domain("fidelity of an unnormalizable state".into()));
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr() / (na * nb))
    }

    /// Relative amplitude of a single-qubit state (homogeneous convention).
    pub fn rel_amp(&self) -> Result<RelAmp> {
        if self.n_qubits != 1 {
            return Err(Error::DimensionMismatch(
                "relative amplitude of a multi-qubit state".into(),
            ));
        }
        Ok(RelAmp::from_pair(self.amps[0], self.amps[1]))
    }

    /// Relative amplitudes h_i = k_i / k_{2ⁿ−1}.
    pub fn relative_amplitudes(&self) -> Result<Vec<Complex64>> {
        let last = *self.amps.last().unwrap();
        if last.norm() < 1e-12 {
            return Err(Error::DegenerateInput(
                "last basis amplitude vanishes; relative form undefined".into(),
            ));
        }
        Ok(self.amps[..self.amps.len() - 1]
            .iter()
            .map(|a| a / last)
            .collect())
    }

    /// Equality up to a global phase, on normalized copies.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        let (na, nb) = (self.norm_sqr().sqrt(), other.norm_sqr().sqrt());
        if na < 1e-15 || nb < 1e-15 {
            return false;
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if inner.norm() < 1e-15 {
            return false;
        } else {
            inner / inner.norm()
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a / na * phase - b / nb).norm() <= tol)
    }

    /// Rescales so the 2-norm is 1; keeps success bookkeeping.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm_sqr().sqrt();
        let mut st = self.clone();
        if n > 0.0 {
            for a in &mut st.amps {
                *a /= n;
            }
        }
        st
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCap {
            qubits: n,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}
