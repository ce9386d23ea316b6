//! Laboratory for the general quantum Bernoulli factory.
//!
//! A quoin is the single-qubit state |ψ_p⟩ = √p|0⟩ + √(1−p)|1⟩ with unknown
//! bias p. Starting from quoins, unitaries, projective measurements and
//! constant auxiliary qubits, one can construct *Bernoulli states* — n-qubit
//! states whose relative amplitudes h_i(p) live in the field
//! 𝕄 = ℂ(p)[s]/(s² − p/(1−p)) — and, by post-selected measurement, classical
//! coins with head probability q(p) = Σ_ℍ|h_j|² / Σ_𝔹|h_i|².
//!
//! The crate provides:
//!
//! - [`field`]: exact-ish arithmetic in 𝕄 (complex rational functions of p
//!   extended by s = √(p/(1−p))) with an evaluation homomorphism.
//! - [`state`]: a small dense state-vector engine (numeric and symbolic
//!   amplitudes) supporting non-unitary projector blocks and post-selection
//!   with cumulative success-probability tracking.
//! - [`constructor`]: the basic multiply/add/inverse operations on relative
//!   amplitudes, circuit plans, and synthesis of arbitrary target amplitudes.
//! - [`coin`]: coin functions built from states, classical (Keane–O'Brien)
//!   and quantum (simple-and-poly-bounded) feasibility checks, and the
//!   continuity extension across removable singularities.
//! - [`classical`]: classical Bernoulli-factory protocols (von Neumann
//!   unbiasing, ratio coins, the three g(p) = 4p(1−p) protocols) and the
//!   quantum-vs-classical consumption accounting.
//! - [`fidelity`]: truth-table fidelity calculus with Hofmann process-fidelity
//!   bounds and a noisy truth-table simulator.

pub mod classical;
pub mod coin;
pub mod constructor;
pub mod error;
pub mod field;
pub mod fidelity;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
pub use field::{FieldElement, Poly, RationalFn};
pub use state::{Operator, RelAmp, StateVector, SymbolicState};
pub use constructor::CircuitPlan;
pub use coin::CoinFunction;
pub use classical::ConsumptionLedger;
pub use fidelity::TruthTable;
