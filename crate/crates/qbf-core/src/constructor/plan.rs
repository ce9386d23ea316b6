//! Circuit plans: serializable step lists executable in numeric or symbolic
//! mode.
//!
//! A plan is one attempt of a post-selected construction. Numeric execution
//! collapses every post-selection onto the requested branch and accumulates
//! the attempt's total success probability; whether the attempt "happened"
//! is a separate Bernoulli draw by the caller. Symbolic execution tracks
//! relative amplitudes in 𝕄 and simply keeps selected branches.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::state::{Operator, RelAmp, StateVector, SymbolicState};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateName {
    X,
    H,
    Cnot,
    PhotonicCnot,
    PhotonicAdd,
    PhotonicPPrep,
}

impl GateName {
    pub fn to_operator(&self) -> Operator {
        match self {
            GateName::X => Operator::pauli_x(),
            GateName::H => Operator::hadamard(),
            GateName::Cnot => Operator::cnot(),
            GateName::PhotonicCnot => Operator::photonic_cnot(),
            GateName::PhotonicAdd => Operator::photonic_add(),
            GateName::PhotonicPPrep => Operator::photonic_p_prep(),
        }
    }
}

fn ser_formula<S: Serializer>(
    value: &FieldElement,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.to_string())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum PlanStep {
    /// Appends a fresh quoin as the new last qubit.
    InjectQuoin,
    /// Appends the constant state α|0⟩ + |1⟩ (∞ marker: |0⟩).
    InjectConstant { alpha: RelAmp },
    /// Appends a single-qubit Bernoulli state with the given relative
    /// amplitude, assumed already synthesized.
    InjectPrepared {
        #[serde(serialize_with = "ser_formula")]
        value: FieldElement,
    },
    Apply { gate: GateName, targets: Vec<usize> },
    /// Swap of two basis amplitudes (a permutation unitary).
    AmpSwap { i: usize, j: usize },
    /// The Hadamard-like block [[1,−1],[1,1]]/√2 on a basis-amplitude pair.
    AmpRotate { i: usize, j: usize },
    PostSelect { qubit: usize, outcome: u8 },
}

/// An ordered construction recipe. `quoins_per_attempt` counts the
/// InjectQuoin steps.
#[derive(Clone, Debug, Serialize)]
pub struct CircuitPlan {
    pub description: String,
    pub quoins_per_attempt: u64,
    pub steps: Vec<PlanStep>,
}

impl CircuitPlan {
    pub fn new(description: impl Into<String>, steps: Vec<PlanStep>) -> Self {
        let quoins = steps
            .iter()
            .filter(|s| matches!(s, PlanStep::InjectQuoin))
            .count() as u64;
        CircuitPlan {
            description: description.into(),
            quoins_per_attempt: quoins,
            steps,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization")
    }

    /// One numeric attempt at bias p, collapsing each post-selection onto its
    /// branch. The result's `success_prob` is the attempt's acceptance
    /// probability.
    pub fn run_numeric(&self, p: f64) -> Result<StateVector> {
        let mut reg: Option<StateVector> = None;
        for step in &self.steps {
            reg = Some(match step {
                PlanStep::InjectQuoin => attach(reg, StateVector::quoin(p)?)?,
                PlanStep::InjectConstant { alpha } => attach(reg, StateVector::constant(*alpha))?,
                PlanStep::InjectPrepared { value } => {
                    let h = value.eval(p)?;
                    attach(reg, StateVector::constant(RelAmp::Finite(h)))?
                }
                PlanStep::Apply { gate, targets } => {
                    current(reg)?.apply(&gate.to_operator(), targets)?
                }
                PlanStep::AmpSwap { i, j } => current(reg)?.swap_amps(*i, *j),
                PlanStep::AmpRotate { i, j } => current(reg)?.rotate_pair(*i, *j),
                PlanStep::PostSelect { qubit, outcome } => {
                    current(reg)?.postselect(*qubit, *outcome)?.0
                }
            });
        }
        current(reg)
    }

    /// Symbolic execution: relative amplitudes stay in 𝕄; post-selection
    /// keeps the chosen branch without renormalization.
    pub fn run_symbolic(&self) -> Result<SymbolicState> {
        let mut reg: Option<SymbolicState> = None;
        for step in &self.steps {
            reg = Some(match step {
                PlanStep::InjectQuoin => attach_sym(reg, SymbolicState::quoin())?,
                PlanStep::InjectConstant { alpha } => {
                    attach_sym(reg, SymbolicState::constant(*alpha))?
                }
                PlanStep::InjectPrepared { value } => attach_sym(
                    reg,
                    SymbolicState::from_amps(1, vec![value.clone(), FieldElement::one()])?,
                )?,
                PlanStep::Apply { gate, targets } => {
                    current(reg)?.apply(&gate.to_operator(), targets)?
                }
                PlanStep::AmpSwap { i, j } => current(reg)?.swap_amps(*i, *j),
                PlanStep::AmpRotate { i, j } => current(reg)?.rotate_pair(*i, *j),
                PlanStep::PostSelect { qubit, outcome } => {
                    current(reg)?.postselect(*qubit, *outcome)?
                }
            });
        }
        current(reg)
    }
}

fn current<T>(reg: Option<T>) -> Result<T> {
    reg.ok_or_else(|| Error::Synthesis("plan applies an operation before any injection".into()))
}

fn attach(reg: Option<StateVector>, new: StateVector) -> Result<StateVector> {
    match reg {
        None => Ok(new),
        Some(st) => st.tensor(&new),
    }
}

fn attach_sym(reg: Option<SymbolicState>, new: SymbolicState) -> Result<SymbolicState> {
    match reg {
        None => Ok(new),
        Some(st) => st.tensor(&new),
    }
}
