//! The three canned constructions: the example coin state |f_q(p)⟩, the
//! g(p) state, and the |p⟩ state.

use rand::Rng;

use crate::classical::ConsumptionLedger;
use crate::error::{Error, Result};
use crate::state::StateVector;

use super::plan::{CircuitPlan, GateName, PlanStep};
use super::DEFAULT_ATTEMPT_CAP;

/// ((X·H)⊗I)(M₀⊗I + M₁⊗X) on two quoins, post-selecting the second qubit on
/// |0⟩: the remaining qubit is (2p−1)|0⟩ + |1⟩. Acceptance probability
/// ((2p−1)² + 1)/16, minimal (1/16) at p = 1/2.
pub fn example_coin_plan() -> CircuitPlan {
    CircuitPlan::new(
        "example coin state (2p−1)|0⟩ + |1⟩",
        vec![
            PlanStep::InjectQuoin,
            PlanStep::InjectQuoin,
            PlanStep::Apply {
                gate: GateName::PhotonicCnot,
                targets: vec![0, 1],
            },
            PlanStep::Apply {
                gate: GateName::H,
                targets: vec![0],
            },
            PlanStep::Apply {
                gate: GateName::X,
                targets: vec![0],
            },
            PlanStep::PostSelect { qubit: 1, outcome: 0 },
        ],
    )
}

/// Per-attempt acceptance of the example-coin circuit.
pub fn example_coin_success_prob(p: f64) -> f64 {
    let d = 2.0 * p - 1.0;
    (d * d + 1.0) / 16.0
}

/// CNOT → H → CNOT on two quoins, post-selecting the second qubit on |1⟩:
/// the remaining qubit is ∝ 2√(p(1−p))|0⟩ + (2p−1)|1⟩, whose σ_z head
/// probability is 4p(1−p). Abstract gates, acceptance 1/2.
pub fn g_state_plan() -> CircuitPlan {
    CircuitPlan::new(
        "g(p) state 2√(p(1−p))|0⟩ + (2p−1)|1⟩",
        vec![
            PlanStep::InjectQuoin,
            PlanStep::InjectQuoin,
            PlanStep::Apply {
                gate: GateName::Cnot,
                targets: vec![0, 1],
            },
            PlanStep::Apply {
                gate: GateName::H,
                targets: vec![0],
            },
            PlanStep::Apply {
                gate: GateName::Cnot,
                targets: vec![0, 1],
            },
            PlanStep::PostSelect { qubit: 1, outcome: 1 },
        ],
    )
}

/// The two-qubit state measured jointly in the third g(p) protocol:
/// CNOT → H, no post-selection step; g(p) is the probability of |01⟩
/// conditioned on {|01⟩, |10⟩}.
pub fn g_joint_plan() -> CircuitPlan {
    CircuitPlan::new(
        "joint state for the post-selected g(p) measurement",
        vec![
            PlanStep::InjectQuoin,
            PlanStep::InjectQuoin,
            PlanStep::Apply {
                gate: GateName::Cnot,
                targets: vec![0, 1],
            },
            PlanStep::Apply {
                gate: GateName::H,
                targets: vec![0],
            },
        ],
    )
}

/// The photonic |p⟩ preparation: (H·M₀)⊗(H·M₀) + (M₁·M_d·M₁)⊗X on two
/// quoins, post-selecting the second qubit on |0⟩; the remaining qubit is
/// p|0⟩ + |1⟩.
pub fn p_state_plan() -> CircuitPlan {
    CircuitPlan::new(
        "Bernoulli state p|0⟩ + |1⟩",
        vec![
            PlanStep::InjectQuoin,
            PlanStep::InjectQuoin,
            PlanStep::Apply {
                gate: GateName::PhotonicPPrep,
                targets: vec![0, 1],
            },
            PlanStep::PostSelect { qubit: 1, outcome: 0 },
        ],
    )
}

fn run_with_retries(
    plan: &CircuitPlan,
    p: f64,
    rng: &mut impl Rng,
    cap: u64,
) -> Result<(StateVector, u64, ConsumptionLedger)> {
    let mut ledger = ConsumptionLedger::new();
    for attempt in 1..=cap {
        ledger.quoins_consumed += plan.quoins_per_attempt;
        let state = plan.run_numeric(p)?;
        if rng.random_bool(state.success_prob().clamp(0.0, 1.0)) {
            ledger.outputs_produced += 1;
            return Ok((state, attempt, ledger));
        }
    }
    Err(Error::AttemptCap(cap))
}

/// Builds |f_q(p)⟩ = (2p−1)|0⟩ + |1⟩, retrying failed post-selections with
/// fresh quoins. Returns the state, the attempts used, and the consumption
/// ledger (2 quoins per attempt).
pub fn build_example_coin(
    p: f64,
    rng: &mut impl Rng,
) -> Result<(StateVector, u64, ConsumptionLedger)> {
    run_with_retries(&example_coin_plan(), p, rng, DEFAULT_ATTEMPT_CAP)
}

/// Builds the g(p) state (protocol 2). Measuring it in σ_z gives heads with
/// probability 4p(1−p).
pub fn build_g_state(p: f64, rng: &mut impl Rng) -> Result<(StateVector, ConsumptionLedger)> {
    let (state, _, ledger) = run_with_retries(&g_state_plan(), p, rng, DEFAULT_ATTEMPT_CAP)?;
    Ok((state, ledger))
}

/// Builds |p⟩ = p|0⟩ + |1⟩ on the configured photonic logic.
pub fn build_p_state(p: f64, rng: &mut impl Rng) -> Result<(StateVector, ConsumptionLedger)> {
    let (state, _, ledger) = run_with_retries(&p_state_plan(), p, rng, DEFAULT_ATTEMPT_CAP)?;
    Ok((state, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use crate::state::RelAmp;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn example_coin_success_probabilities() {
        assert!((example_coin_success_prob(0.5) - 0.0625).abs() < 1e-15);
        let st = example_coin_plan().run_numeric(0.5).unwrap();
        assert!((st.success_prob() - 0.0625).abs() < 1e-12);
        let st = example_coin_plan().run_numeric(0.2).unwrap();
        assert!((st.success_prob() - example_coin_success_prob(0.2)).abs() < 1e-12);
    }

    #[test]
    fn example_coin_relative_amplitudes() {
        let mut rng = derive_rng(21, &[]);
        // p = 1 → |D⟩ (h = 1); p = 0 → |A⟩ (h = −1); p = 1/2 → |1⟩ (h = 0)
        let (st, _, ledger) = build_example_coin(1.0, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().approx_eq(&RelAmp::finite(1.0, 0.0), 1e-9));
        assert_eq!(ledger.quoins_consumed % 2, 0);
        let (st, _, _) = build_example_coin(0.0, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().approx_eq(&RelAmp::finite(-1.0, 0.0), 1e-9));
        let (st, _, _) = build_example_coin(0.5, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().is_zero());
        // at p = 1/2 the target is |1⟩ exactly
        assert!(st.fidelity(&StateVector::basis(1, 1).unwrap()).unwrap() > 1.0 - 1e-12);
        let (st, _, _) = build_example_coin(0.3, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().approx_eq(&RelAmp::finite(-0.4, 0.0), 1e-9));
    }

    #[test]
    fn example_coin_conditional_born_probabilities() {
        // head probability of the f_q state: |h|²/(1+|h|²), 0.36/1.36 at p=0.2
        let st = example_coin_plan().run_numeric(0.2).unwrap();
        let probs = st.born_probs(&[0, 1]).unwrap();
        assert!((probs[&0] - 0.36 / 1.36).abs() < 1e-10);
        // g-measurement state: P(01 | {01,10}) = 4p(1−p) = 0.84 at p=0.3
        let st = g_joint_plan().run_numeric(0.3).unwrap();
        let probs = st.born_probs(&[0b01, 0b10]).unwrap();
        assert!((probs[&0b01] - 0.84).abs() < 1e-10);
    }

    #[test]
    fn example_coin_symbolic_form() {
        let sym = example_coin_plan().run_symbolic().unwrap();
        let h = sym.relative_amplitude().unwrap();
        for p in [0.15, 0.5, 0.85] {
            assert!((h.eval(p).unwrap() - c(2.0 * p - 1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn g_state_head_probability() {
        let mut rng = derive_rng(22, &[]);
        for p in [0.5, 0.3, 0.0, 1.0] {
            let (st, _) = build_g_state(p, &mut rng).unwrap();
            let head = st.amps()[0].norm_sqr();
            assert!((head - 4.0 * p * (1.0 - p)).abs() < 1e-9, "p = {p}");
        }
        // abstract-unitary acceptance is 1/2
        let st = g_state_plan().run_numeric(0.3).unwrap();
        assert!((st.success_prob() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn p_state_relative_amplitude() {
        let mut rng = derive_rng(23, &[]);
        let (st, _) = build_p_state(0.5, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().approx_eq(&RelAmp::finite(0.5, 0.0), 1e-9));
        let (st, _) = build_p_state(0.999, &mut rng).unwrap();
        assert!(st.rel_amp().unwrap().approx_eq(&RelAmp::finite(0.999, 0.0), 1e-6));
    }

    #[test]
    fn p_state_symbolic_is_rational_p() {
        let sym = p_state_plan().run_symbolic().unwrap();
        let h = sym.relative_amplitude().unwrap();
        assert!(h.approx_eq(&crate::field::FieldElement::rational_p(), 1e-10));
    }
}
