//! Compiling amplitude expressions into circuit plans.
//!
//! Single-qubit synthesis walks the expression tree bottom-up, one basic
//! operation per internal node, with a stack discipline on the qubit
//! register: each operand occupies one qubit, a two-qubit operation fuses
//! the top two and post-selects one away. Subtrees containing no quoin fold
//! to a single constant-state injection (constant states are free auxiliary
//! resources). No other circuit optimization is performed.
//!
//! Multi-qubit synthesis starts from the constant balanced n-qubit state
//! (|0⟩ constants through Hadamards) and multiplies each prepared
//! single-qubit state onto its basis amplitude one by one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::state::{RelAmp, SymbolicState, MAX_QUBITS};

use super::plan::{CircuitPlan, GateName, PlanStep};

/// An expression over complex constants and the quoin amplitude s, closed
/// under the field operations.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprTree {
    Const(Complex64),
    S,
    Add(Box<ExprTree>, Box<ExprTree>),
    Sub(Box<ExprTree>, Box<ExprTree>),
    Mul(Box<ExprTree>, Box<ExprTree>),
    Div(Box<ExprTree>, Box<ExprTree>),
    Inv(Box<ExprTree>),
    Neg(Box<ExprTree>),
}

impl ExprTree {
    pub fn constant(re: f64, im: f64) -> Self {
        ExprTree::Const(Complex64::new(re, im))
    }

    /// The rational element p expressed through s: (s·s)·inv(s·s + 1). This
    /// is exactly the four-gate plan that multiplies two quoins, adds the
    /// constant 1, inverts, and multiplies again.
    pub fn p() -> Self {
        let u = ExprTree::Mul(Box::new(ExprTree::S), Box::new(ExprTree::S));
        ExprTree::Mul(
            Box::new(u.clone()),
            Box::new(ExprTree::Inv(Box::new(ExprTree::Add(
                Box::new(u),
                Box::new(ExprTree::constant(1.0, 0.0)),
            )))),
        )
    }

    /// Evaluates the tree in 𝕄. This is pure field arithmetic, independent
    /// of any circuit simulation.
    pub fn eval_field(&self) -> Result<FieldElement> {
        match self {
            ExprTree::Const(c) => Ok(FieldElement::from_complex(*c)),
            ExprTree::S => Ok(FieldElement::s()),
            ExprTree::Add(l, r) => l.eval_field()?.add(&r.eval_field()?),
            ExprTree::Sub(l, r) => l.eval_field()?.sub(&r.eval_field()?),
            ExprTree::Mul(l, r) => l.eval_field()?.mul(&r.eval_field()?),
            ExprTree::Div(l, r) => {
                let d = r.eval_field()?;
                if d.is_zero() {
                    return Err(Error::Synthesis("division by the zero element".into()));
                }
                l.eval_field()?.div(&d)
            }
            ExprTree::Inv(x) => {
                let v = x.eval_field()?;
                if v.is_zero() {
                    return Err(Error::Synthesis("inverse of the zero element".into()));
                }
                v.inv()
            }
            ExprTree::Neg(x) => Ok(x.eval_field()?.neg()),
        }
    }

    /// Constant value of a quoin-free subtree, if any.
    fn fold_constant(&self) -> Option<Complex64> {
        match self {
            ExprTree::Const(c) => Some(*c),
            ExprTree::S => None,
            ExprTree::Add(l, r) => Some(l.fold_constant()? + r.fold_constant()?),
            ExprTree::Sub(l, r) => Some(l.fold_constant()? - r.fold_constant()?),
            ExprTree::Mul(l, r) => Some(l.fold_constant()? * r.fold_constant()?),
            ExprTree::Div(l, r) => {
                let d = r.fold_constant()?;
                if d.norm() < 1e-12 {
                    None
                } else {
                    Some(l.fold_constant()? / d)
                }
            }
            ExprTree::Inv(x) => {
                let v = x.fold_constant()?;
                if v.norm() < 1e-12 {
                    None
                } else {
                    Some(1.0 / v)
                }
            }
            ExprTree::Neg(x) => Some(-x.fold_constant()?),
        }
    }
}

/// Output of a synthesis call: the plan, the symbolic state it produces, and
/// the target value in 𝕄.
#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub plan: CircuitPlan,
    pub state: SymbolicState,
    pub value: FieldElement,
}

/// Compiles an expression into a plan built only from quoins, constant
/// states, the multiply/divide and add/subtract circuits, and the Pauli-X
/// inversion.
pub fn synthesize_single(expr: &ExprTree) -> Result<SynthesisResult> {
    let value = expr.eval_field()?;
    let mut steps = Vec::new();
    let mut reg = 0usize;
    compile(expr, &mut steps, &mut reg)?;
    debug_assert_eq!(reg, 1);
    let plan = CircuitPlan::new(format!("synthesize |{value}⟩"), steps);
    let state = plan.run_symbolic()?;
    Ok(SynthesisResult { plan, state, value })
}

fn push_operand(steps: &mut Vec<PlanStep>, reg: &mut usize) -> Result<()> {
    *reg += 1;
    if *reg > MAX_QUBITS {
        return Err(Error::QubitCap {
            qubits: *reg,
            cap: MAX_QUBITS,
        });
    }
    let _ = steps;
    Ok(())
}

fn compile(expr: &ExprTree, steps: &mut Vec<PlanStep>, reg: &mut usize) -> Result<()> {
    if let Some(c) = expr.fold_constant() {
        steps.push(PlanStep::InjectConstant {
            alpha: RelAmp::Finite(c),
        });
        return push_operand(steps, reg);
    }
    match expr {
        ExprTree::Const(_) => unreachable!("constants fold"),
        ExprTree::S => {
            steps.push(PlanStep::InjectQuoin);
            push_operand(steps, reg)
        }
        ExprTree::Mul(l, r) => {
            compile(l, steps, reg)?;
            compile(r, steps, reg)?;
            fuse_pair(steps, reg, GateName::PhotonicCnot, *reg - 1, 0)
        }
        ExprTree::Div(l, r) => {
            if r.eval_field()?.is_zero() {
                return Err(Error::Synthesis("division by the zero element".into()));
            }
            compile(l, steps, reg)?;
            compile(r, steps, reg)?;
            fuse_pair(steps, reg, GateName::PhotonicCnot, *reg - 1, 1)
        }
        ExprTree::Add(l, r) => {
            compile(l, steps, reg)?;
            steps.push(PlanStep::Apply {
                gate: GateName::X,
                targets: vec![*reg - 1],
            });
            compile(r, steps, reg)?;
            compile_add_tail(steps, reg, 0)
        }
        ExprTree::Sub(l, r) => {
            // the add circuit produces h₂ − h₁, so feed r as the first operand
            compile(r, steps, reg)?;
            steps.push(PlanStep::Apply {
                gate: GateName::X,
                targets: vec![*reg - 1],
            });
            compile(l, steps, reg)?;
            compile_add_tail(steps, reg, 1)
        }
        ExprTree::Inv(x) => {
            if x.eval_field()?.is_zero() {
                return Err(Error::Synthesis("inverse of the zero element".into()));
            }
            compile(x, steps, reg)?;
            steps.push(PlanStep::Apply {
                gate: GateName::X,
                targets: vec![*reg - 1],
            });
            Ok(())
        }
        ExprTree::Neg(x) => {
            let negated = ExprTree::Mul(
                Box::new(ExprTree::constant(-1.0, 0.0)),
                Box::new((**x).clone()),
            );
            compile(&negated, steps, reg)
        }
    }
}

/// Photonic two-qubit block on the top two operands, post-selecting the
/// measured qubit away. `measure_top` selects which of the pair is measured.
fn fuse_pair(
    steps: &mut Vec<PlanStep>,
    reg: &mut usize,
    gate: GateName,
    measured: usize,
    outcome: u8,
) -> Result<()> {
    steps.push(PlanStep::Apply {
        gate,
        targets: vec![*reg - 2, *reg - 1],
    });
    steps.push(PlanStep::PostSelect {
        qubit: measured,
        outcome,
    });
    *reg -= 1;
    Ok(())
}

fn compile_add_tail(steps: &mut Vec<PlanStep>, reg: &mut usize, outcome: u8) -> Result<()> {
    steps.push(PlanStep::Apply {
        gate: GateName::PhotonicAdd,
        targets: vec![*reg - 2, *reg - 1],
    });
    steps.push(PlanStep::Apply {
        gate: GateName::H,
        targets: vec![*reg - 2],
    });
    steps.push(PlanStep::PostSelect {
        qubit: *reg - 2,
        outcome,
    });
    *reg -= 1;
    Ok(())
}

/// Builds an n-qubit Bernoulli state with the given 2ⁿ−1 relative amplitudes
/// (the last amplitude is 1): a constant balanced state through Hadamards,
/// then one general multiply per basis amplitude using a prepared
/// single-qubit state.
pub fn synthesize_multi(targets: &[FieldElement]) -> Result<(CircuitPlan, SymbolicState)> {
    let dim = targets.len() + 1;
    if !dim.is_power_of_two() || dim < 4 {
        return Err(Error::Synthesis(format!(
            "need 2^n − 1 target amplitudes with n ≥ 2, got {}",
            targets.len()
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n + 1 > MAX_QUBITS {
        return Err(Error::QubitCap {
            qubits: n + 1,
            cap: MAX_QUBITS,
        });
    }
    let mut steps = Vec::new();
    for q in 0..n {
        steps.push(PlanStep::InjectConstant {
            alpha: RelAmp::Infinity,
        });
        steps.push(PlanStep::Apply {
            gate: GateName::H,
            targets: vec![q],
        });
    }
    for (k, h) in targets.iter().enumerate() {
        // auxiliary appended as the last qubit: swap |k⟩|0⟩ ↔ |k⟩|1⟩ and
        // keep the aux measurement outcome |1⟩
        steps.push(PlanStep::InjectPrepared { value: h.clone() });
        steps.push(PlanStep::AmpSwap {
            i: 2 * k,
            j: 2 * k + 1,
        });
        steps.push(PlanStep::PostSelect {
            qubit: n,
            outcome: 1,
        });
    }
    let plan = CircuitPlan::new(format!("synthesize {n}-qubit Bernoulli state"), steps);
    let state = plan.run_symbolic()?;
    Ok((plan, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoin_expression_is_one_injection() {
        let out = synthesize_single(&ExprTree::S).unwrap();
        assert_eq!(out.plan.steps.len(), 1);
        assert_eq!(out.plan.quoins_per_attempt, 1);
        assert!(out
            .state
            .relative_amplitude()
            .unwrap()
            .approx_eq(&FieldElement::s(), 1e-12));
    }

    /// (s·s − 1)·inv(s·s + 1) = 2p − 1 compiles to the five-block procedure:
    /// two-quoin multiplies, two constant adds, the inversion, and the final
    /// multiply.
    #[test]
    fn example_coin_expression_compiles_to_five_blocks() {
        let u = || ExprTree::Mul(Box::new(ExprTree::S), Box::new(ExprTree::S));
        let expr = ExprTree::Mul(
            Box::new(ExprTree::Add(
                Box::new(u()),
                Box::new(ExprTree::constant(-1.0, 0.0)),
            )),
            Box::new(ExprTree::Inv(Box::new(ExprTree::Add(
                Box::new(u()),
                Box::new(ExprTree::constant(1.0, 0.0)),
            )))),
        );
        let out = synthesize_single(&expr).unwrap();
        assert_eq!(out.plan.quoins_per_attempt, 4);
        let two_qubit_blocks = out
            .plan
            .steps
            .iter()
            .filter(|s| {
                matches!(
                    s,
                    PlanStep::Apply {
                        gate: GateName::PhotonicCnot | GateName::PhotonicAdd,
                        ..
                    }
                )
            })
            .count();
        assert_eq!(two_qubit_blocks, 5);
        for p in [0.1, 0.35, 0.8] {
            let got = out.state.relative_amplitude().unwrap().eval(p).unwrap();
            assert!((got - Complex64::new(2.0 * p - 1.0, 0.0)).norm() < 1e-9);
        }
    }

    /// p = (s·s)·inv(s·s + 1): four two-qubit blocks plus the free X.
    #[test]
    fn p_expression_compiles_to_four_blocks() {
        let out = synthesize_single(&ExprTree::p()).unwrap();
        assert_eq!(out.plan.quoins_per_attempt, 4);
        let blocks = out
            .plan
            .steps
            .iter()
            .filter(|s| {
                matches!(
                    s,
                    PlanStep::Apply {
                        gate: GateName::PhotonicCnot | GateName::PhotonicAdd,
                        ..
                    }
                )
            })
            .count();
        assert_eq!(blocks, 4);
        let got = out.state.relative_amplitude().unwrap();
        assert!(got.approx_eq(&FieldElement::rational_p(), 1e-9));
    }

    #[test]
    fn inverse_of_zero_rejected() {
        let zero = ExprTree::Sub(Box::new(ExprTree::S), Box::new(ExprTree::S));
        assert!(matches!(
            synthesize_single(&ExprTree::Inv(Box::new(zero))),
            Err(Error::Synthesis(_))
        ));
    }

    #[test]
    fn multi_with_unit_targets_keeps_balanced_state() {
        let targets = vec![FieldElement::one(), FieldElement::one(), FieldElement::one()];
        let (plan, state) = synthesize_multi(&targets).unwrap();
        assert_eq!(state.n_qubits(), 2);
        for amp in state.amps() {
            // all four amplitudes stay equal
            assert!(amp
                .div(&state.amps()[3])
                .unwrap()
                .approx_eq(&FieldElement::one(), 1e-9));
        }
        assert_eq!(plan.quoins_per_attempt, 0);
    }

    /// The intermediate state of the second g(p) protocol,
    /// ∝ |00⟩ + 2√(p(1−p))|01⟩ + (2p−1)|10⟩ + 0·|11⟩, expressed with the
    /// zero amplitude switched onto |00⟩ so the last amplitude is 1:
    /// targets (0, 2(1−p)s, 2p−1).
    #[test]
    fn multi_builds_g_protocol_intermediate() {
        let two_w = FieldElement::s()
            .mul(
                &FieldElement::one()
                    .sub(&FieldElement::rational_p())
                    .unwrap(),
            )
            .unwrap()
            .scale(Complex64::new(2.0, 0.0));
        let two_p_minus_one = FieldElement::rational_p()
            .scale(Complex64::new(2.0, 0.0))
            .sub(&FieldElement::one())
            .unwrap();
        let targets = vec![FieldElement::zero(), two_w, two_p_minus_one];
        let (_, state) = synthesize_multi(&targets).unwrap();
        let p = 0.3;
        let amps = state.eval(p).unwrap();
        let last = amps[3];
        let want = [0.0, 2.0 * (p * (1.0 - p)).sqrt(), 2.0 * p - 1.0];
        for (a, w) in amps[..3].iter().zip(want) {
            assert!((a / last - Complex64::new(w, 0.0)).norm() < 1e-9, "{a} vs {w}");
        }
    }

    #[test]
    fn multi_hits_requested_amplitudes() {
        let two_p_minus_one = ExprTree::p()
            .eval_field()
            .unwrap()
            .scale(Complex64::new(2.0, 0.0))
            .sub(&FieldElement::one())
            .unwrap();
        let targets = vec![
            two_p_minus_one.clone(),
            FieldElement::rational_p(),
            FieldElement::one(),
        ];
        let (_, state) = synthesize_multi(&targets).unwrap();
        for p in [0.2, 0.6] {
            let amps = state.eval(p).unwrap();
            let last = amps[3];
            let rel: Vec<Complex64> = amps[..3].iter().map(|a| a / last).collect();
            assert!((rel[0] - Complex64::new(2.0 * p - 1.0, 0.0)).norm() < 1e-9);
            assert!((rel[1] - Complex64::new(p, 0.0)).norm() < 1e-9);
            assert!((rel[2] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        }
    }
}
