//! Basic operations on relative amplitudes and circuit synthesis.
//!
//! The multiply and add operations run on the two-qubit photonic logic
//! (M₀⊗A + M₁⊗B followed by a configurable single-qubit part C), whose
//! acceptance probabilities are
//!
//!   Pr_m = (|h₁h₂|² + 1) / (8 (|h₁|²+1)(|h₂|²+1))
//!   Pr_a = (|h₁+h₂|² + 1) / (16 (|h₁|²+1)(|h₂|²+1))
//!
//! The inverse operation is a plain Pauli X and always succeeds. The
//! general n-qubit forms manipulate exactly one relative amplitude via an
//! amplitude swap (inverse, multiply) or the Hadamard-like pair rotation
//! (add) followed by measurement of the auxiliary qubit.

pub mod circuits;
pub mod plan;
pub mod synth;

use rand::Rng;

use crate::error::{Error, Result};
use crate::state::{Operator, RelAmp, StateVector};

pub use circuits::{
    build_example_coin, build_g_state, build_p_state, example_coin_plan,
    example_coin_success_prob, g_joint_plan, g_state_plan, p_state_plan,
};
pub use plan::{CircuitPlan, GateName, PlanStep};
pub use synth::{synthesize_multi, synthesize_single, ExprTree, SynthesisResult};

/// Default cap on retried post-selection attempts.
pub const DEFAULT_ATTEMPT_CAP: u64 = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MulMode {
    Multiply,
    Divide,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AddMode {
    Add,
    Subtract,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BasicOpKind {
    Inverse,
    Multiply,
    Add,
}

/// One attempt of a post-selected operation. `state` is the collapsed output
/// branch, valid when `success` is true; `attempt_prob` is this operation's
/// acceptance probability given its inputs. A failed attempt is retriable,
/// not an error.
#[derive(Clone, Debug)]
pub struct OpAttempt {
    pub success: bool,
    pub state: StateVector,
    pub attempt_prob: f64,
}

fn bernoulli(rng: &mut impl Rng, p: f64) -> bool {
    rng.random_bool(p.clamp(0.0, 1.0))
}

/// |h₁⟩,|h₂⟩ → |h₁h₂⟩ (post-select second qubit |0⟩) or |h₁/h₂⟩
/// (post-select |1⟩) on the photonic CNOT block.
pub fn multiply_states(
    x: &StateVector,
    y: &StateVector,
    mode: MulMode,
    rng: &mut impl Rng,
) -> Result<OpAttempt> {
    let hx = x.rel_amp()?;
    let hy = y.rel_amp()?;
    match mode {
        MulMode::Multiply => {
            if (hx.is_zero() && hy.is_infinite()) || (hx.is_infinite() && hy.is_zero()) {
                return Err(Error::DegenerateInput("0·∞ in multiply".into()));
            }
        }
        MulMode::Divide => {
            if hy.is_zero() {
                return Err(Error::DegenerateInput("division by h₂ = 0".into()));
            }
            if hx.is_infinite() && hy.is_infinite() {
                return Err(Error::DegenerateInput("∞/∞ in divide".into()));
            }
        }
    }
    let outcome = match mode {
        MulMode::Multiply => 0,
        MulMode::Divide => 1,
    };
    let joint = x.tensor(y)?;
    let blocked = joint.apply(&Operator::photonic_cnot(), &[0, 1])?;
    let (state, prob) = blocked.postselect(1, outcome)?;
    Ok(OpAttempt {
        success: bernoulli(rng, prob),
        state,
        attempt_prob: prob,
    })
}

/// |h₁⟩,|h₂⟩ → |h₁+h₂⟩ (post-select first qubit |0⟩) or |h₂−h₁⟩
/// (post-select |1⟩). The reversion of the first operand is merged into the
/// preparation: the circuit receives |1/h₁⟩, which the homogeneous amplitude
/// pair represents even at h₁ = 0.
pub fn add_states(
    x: &StateVector,
    y: &StateVector,
    mode: AddMode,
    rng: &mut impl Rng,
) -> Result<OpAttempt> {
    let hx = x.rel_amp()?;
    let hy = y.rel_amp()?;
    if hx.is_infinite() && hy.is_infinite() {
        return Err(Error::DegenerateInput("both add operands are the ∞ marker".into()));
    }
    let outcome = match mode {
        AddMode::Add => 0,
        AddMode::Subtract => 1,
    };
    let prepared = invert_state(x)?;
    let joint = prepared.tensor(y)?;
    let blocked = joint.apply(&Operator::photonic_add(), &[0, 1])?;
    let mixed = blocked.apply(&Operator::hadamard(), &[0])?;
    let (state, prob) = mixed.postselect(0, outcome)?;
    Ok(OpAttempt {
        success: bernoulli(rng, prob),
        state,
        attempt_prob: prob,
    })
}

/// |h⟩ → |1/h⟩ via Pauli X; deterministic, no post-selection. The
/// homogeneous representation absorbs 0 ↔ ∞.
pub fn invert_state(x: &StateVector) -> Result<StateVector> {
    if x.n_qubits() != 1 {
        return Err(Error::DimensionMismatch("invert_state takes a single qubit".into()));
    }
    x.apply(&Operator::pauli_x(), &[0])
}

/// The theorem's basic operations on an n-qubit state: replaces exactly the
/// relative amplitude at `target_basis` by 1/h, h·l or h+l, leaving every
/// other relative amplitude unchanged.
///
/// For the inverse the auxiliary must be prepared as |h_k⟩ (same relative
/// amplitude as the target); for multiply and add it is |l⟩. The add variant
/// applies the pair-rotation unitary and then rescales by the constant √2
/// state, so one attempt chains two post-selections.
pub fn apply_basic_general(
    kind: BasicOpKind,
    state: &StateVector,
    aux: &StateVector,
    target_basis: usize,
    rng: &mut impl Rng,
) -> Result<OpAttempt> {
    if aux.n_qubits() != 1 {
        return Err(Error::DimensionMismatch("auxiliary must be a single qubit".into()));
    }
    let n = state.n_qubits();
    let dim = 1usize << n;
    if target_basis >= dim - 1 {
        return Err(Error::DimensionMismatch(format!(
            "target basis {target_basis} outside [0, 2^n − 2]"
        )));
    }
    let norm = state.norm_sqr().sqrt();
    match kind {
        BasicOpKind::Inverse => {
            if state.amps()[target_basis].norm() < 1e-12 * (1.0 + norm) {
                return Err(Error::DegenerateInput(
                    "inverse of a vanishing relative amplitude".into(),
                ));
            }
            let joint = aux.tensor(state)?;
            let swapped = joint.swap_amps(target_basis, dim + (dim - 1));
            let (out, prob) = swapped.postselect(0, 0)?;
            Ok(OpAttempt {
                success: bernoulli(rng, prob),
                state: out,
                attempt_prob: prob,
            })
        }
        BasicOpKind::Multiply => {
            let joint = aux.tensor(state)?;
            let swapped = joint.swap_amps(target_basis, dim + target_basis);
            let (out, prob) = swapped.postselect(0, 1)?;
            Ok(OpAttempt {
                success: bernoulli(rng, prob),
                state: out,
                attempt_prob: prob,
            })
        }
        BasicOpKind::Add => {
            let joint = aux.tensor(state)?;
            let rotated = joint.rotate_pair(dim - 1, dim + target_basis);
            let (mid, prob1) = rotated.postselect(0, 1)?;
            // (h_k + l)/√2 at the target; rescale by the constant √2 state.
            let sqrt2 = StateVector::constant(RelAmp::finite(std::f64::consts::SQRT_2, 0.0));
            let joint2 = sqrt2.tensor(&mid)?;
            let swapped = joint2.swap_amps(target_basis, dim + target_basis);
            let (out, prob2) = swapped.postselect(0, 1)?;
            let prob = prob1 * prob2;
            Ok(OpAttempt {
                success: bernoulli(rng, prob),
                state: out,
                attempt_prob: prob,
            })
        }
    }
}

/// Retries a fallible attempt until success or `cap` attempts; returns the
/// output state and the number of attempts used.
pub fn retry_until_success<F>(mut attempt: F, cap: u64) -> Result<(StateVector, u64)>
where
    F: FnMut() -> Result<OpAttempt>,
{
    for i in 1..=cap {
        let out = attempt()?;
        if out.success {
            return Ok((out.state, i));
        }
    }
    Err(Error::AttemptCap(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn st(h: RelAmp) -> StateVector {
        StateVector::constant(h)
    }

    fn assert_rel(state: &StateVector, want: Complex64) {
        match state.rel_amp().unwrap() {
            RelAmp::Finite(h) => assert!(
                (h - want).norm() < 1e-9 * (1.0 + want.norm()),
                "got {h}, want {want}"
            ),
            RelAmp::Infinity => panic!("finite relative amplitude expected"),
        }
    }

    #[test]
    fn multiply_table_rows() {
        let mut rng = derive_rng(1, &[]);
        // D1M: 1 · 1 = 1
        let out = multiply_states(
            &st(RelAmp::finite(1.0, 0.0)),
            &st(RelAmp::finite(1.0, 0.0)),
            MulMode::Multiply,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(1.0, 0.0));
        // H1M..H4M: 0 · h = 0
        for h2 in [0.0, 1.0, 5.0, 10.0] {
            let out = multiply_states(
                &st(RelAmp::finite(0.0, 0.0)),
                &st(RelAmp::finite(h2, 0.0)),
                MulMode::Multiply,
                &mut rng,
            )
            .unwrap();
            assert!(out.state.rel_amp().unwrap().is_zero());
        }
        // L1M: i · i = −1
        let out = multiply_states(
            &st(RelAmp::finite(0.0, 1.0)),
            &st(RelAmp::finite(0.0, 1.0)),
            MulMode::Multiply,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(-1.0, 0.0));
    }

    #[test]
    fn multiply_success_probability() {
        let mut rng = derive_rng(2, &[]);
        let out = multiply_states(
            &st(RelAmp::finite(0.0, 0.0)),
            &st(RelAmp::finite(0.0, 0.0)),
            MulMode::Multiply,
            &mut rng,
        )
        .unwrap();
        assert!((out.attempt_prob - 0.125).abs() < 1e-12);
    }

    #[test]
    fn divide_recovers_ratio() {
        let mut rng = derive_rng(3, &[]);
        let out = multiply_states(
            &st(RelAmp::finite(0.6, 0.0)),
            &st(RelAmp::finite(0.3, 0.0)),
            MulMode::Divide,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(2.0, 0.0));
        assert!(matches!(
            multiply_states(
                &st(RelAmp::finite(1.0, 0.0)),
                &st(RelAmp::finite(0.0, 0.0)),
                MulMode::Divide,
                &mut rng
            ),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn add_table_rows() {
        let mut rng = derive_rng(4, &[]);
        // D1A: −1 + 1 = 0
        let out = add_states(
            &st(RelAmp::finite(-1.0, 0.0)),
            &st(RelAmp::finite(1.0, 0.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert!(out.state.rel_amp().unwrap().is_zero());
        // D2A: 1 + 1 = 2
        let out = add_states(
            &st(RelAmp::finite(1.0, 0.0)),
            &st(RelAmp::finite(1.0, 0.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(2.0, 0.0));
        // L1A: i + i = 2i
        let out = add_states(
            &st(RelAmp::finite(0.0, 1.0)),
            &st(RelAmp::finite(0.0, 1.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(0.0, 2.0));
        // R2A: −5.347 + −3.168 = −8.515
        let out = add_states(
            &st(RelAmp::finite(-5.347, 0.0)),
            &st(RelAmp::finite(-3.168, 0.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(-8.515, 0.0));
    }

    #[test]
    fn add_with_zero_and_infinity_operands() {
        let mut rng = derive_rng(5, &[]);
        // H5A: 0.010 + ∞ = ∞
        let out = add_states(
            &st(RelAmp::finite(0.010, 0.0)),
            &st(RelAmp::Infinity),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert!(out.state.rel_amp().unwrap().is_infinite());
        // h₁ = 0 flows through the reciprocal preparation unharmed
        let out = add_states(
            &st(RelAmp::finite(0.0, 0.0)),
            &st(RelAmp::finite(0.7, 0.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(0.7, 0.0));
        assert!(matches!(
            add_states(
                &st(RelAmp::Infinity),
                &st(RelAmp::Infinity),
                AddMode::Add,
                &mut rng
            ),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn subtract_mode() {
        let mut rng = derive_rng(6, &[]);
        // h₂ − h₁ with x = h₁
        let out = add_states(
            &st(RelAmp::finite(1.0, 0.0)),
            &st(RelAmp::finite(3.0, 0.0)),
            AddMode::Subtract,
            &mut rng,
        )
        .unwrap();
        assert_rel(&out.state, c(2.0, 0.0));
    }

    #[test]
    fn add_success_probability_maximum_point() {
        let mut rng = derive_rng(7, &[]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = add_states(
            &st(RelAmp::finite(h, 0.0)),
            &st(RelAmp::finite(h, 0.0)),
            AddMode::Add,
            &mut rng,
        )
        .unwrap();
        assert!((out.attempt_prob - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn invert_examples() {
        let one = st(RelAmp::finite(1.0, 0.0));
        assert_rel(&invert_state(&one).unwrap(), c(1.0, 0.0));
        // h = s at p = 0.2 inverts to 2
        let quoin = StateVector::quoin(0.2).unwrap();
        assert_rel(&invert_state(&quoin).unwrap(), c(2.0, 0.0));
        // invert twice is the identity
        let x = st(RelAmp::finite(0.3, 0.4));
        let twice = invert_state(&invert_state(&x).unwrap()).unwrap();
        assert!(twice.approx_eq_up_to_phase(&x, 1e-12));
    }

    #[test]
    fn general_add_on_two_qubit_state() {
        // (h₀,h₁,h₂) = (2,1,1); add l = 3 at basis 0 gives (5,1,1)
        let mut rng = derive_rng(8, &[]);
        let amps = [c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state =
            StateVector::from_amps(2, amps.iter().map(|a| a / norm).collect()).unwrap();
        let aux = st(RelAmp::finite(3.0, 0.0));
        let out =
            apply_basic_general(BasicOpKind::Add, &state, &aux, 0, &mut rng).unwrap();
        let rel = out.state.relative_amplitudes().unwrap();
        assert!((rel[0] - c(5.0, 0.0)).norm() < 1e-9);
        assert!((rel[1] - c(1.0, 0.0)).norm() < 1e-9);
        assert!((rel[2] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn general_multiply_by_unit_is_identity() {
        let mut rng = derive_rng(9, &[]);
        let amps = [c(0.3, 0.1), c(-0.2, 0.0), c(0.5, -0.4), c(0.6, 0.0)];
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state =
            StateVector::from_amps(2, amps.iter().map(|a| a / norm).collect()).unwrap();
        for k in 0..3 {
            let out = apply_basic_general(
                BasicOpKind::Multiply,
                &state,
                &st(RelAmp::finite(1.0, 0.0)),
                k,
                &mut rng,
            )
            .unwrap();
            let got = out.state.relative_amplitudes().unwrap();
            let want = state.relative_amplitudes().unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn general_inverse_at_basis_zero() {
        // single relative amplitude s at p = 0.2 inverts to 2
        let mut rng = derive_rng(10, &[]);
        let state = StateVector::quoin(0.2).unwrap().tensor(&StateVector::basis(1, 1).unwrap());
        // build the 2-qubit state (s·, ·) ⊗ |1⟩ → relative amps (0, h, 0) pattern is
        // awkward; use a direct 2-qubit state with h₀ = s(0.2) = 0.5 instead.
        drop(state);
        let amps = [c(0.5, 0.0), c(0.8, 0.0), c(-0.3, 0.0), c(1.0, 0.0)];
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state =
            StateVector::from_amps(2, amps.iter().map(|a| a / norm).collect()).unwrap();
        let aux = st(RelAmp::finite(0.5, 0.0));
        let out =
            apply_basic_general(BasicOpKind::Inverse, &state, &aux, 0, &mut rng).unwrap();
        let rel = out.state.relative_amplitudes().unwrap();
        assert!((rel[0] - c(2.0, 0.0)).norm() < 1e-9);
        assert!((rel[1] - c(0.8, 0.0)).norm() < 1e-9);
        assert!((rel[2] - c(-0.3, 0.0)).norm() < 1e-9);

        let zero_target = StateVector::from_amps(
            2,
            vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.0), c(0.8, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            apply_basic_general(BasicOpKind::Inverse, &zero_target, &aux, 0, &mut rng),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn retry_reports_cap() {
        let mut rng = derive_rng(11, &[]);
        let never = || {
            Ok(OpAttempt {
                success: rng.random_bool(0.0),
                state: StateVector::basis(1, 0).unwrap(),
                attempt_prob: 0.0,
            })
        };
        assert!(matches!(retry_until_success(never, 10), Err(Error::AttemptCap(10))));
    }
}
