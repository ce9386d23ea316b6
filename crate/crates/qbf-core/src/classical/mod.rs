//! Classical Bernoulli-factory protocols and consumption accounting.
//!
//! Coin streams draw from an analytic probability, from measuring fresh
//! quoins through the state engine, or from a recorded sequence; every draw
//! increments the toss counter exactly once. The almost-surely-terminating
//! loops of the protocols are bounded by an explicit attempt cap.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructor::circuits::{example_coin_plan, example_coin_success_prob, g_joint_plan, g_state_plan};
use crate::constructor::plan::CircuitPlan;
use crate::constructor::DEFAULT_ATTEMPT_CAP;
use crate::error::{Error, Result};
use crate::state::{Operator, StateVector};

/// Counters of quoins and classical coins consumed per output coin.
/// `loss_survival` is the per-attempt transmission survival factor
/// (1.0 = lossless).
#[derive(Clone, Debug, Serialize)]
pub struct ConsumptionLedger {
    pub quoins_consumed: u64,
    pub classical_coins_consumed: u64,
    pub outputs_produced: u64,
    pub loss_survival: f64,
}

impl ConsumptionLedger {
    pub fn new() -> Self {
        ConsumptionLedger {
            quoins_consumed: 0,
            classical_coins_consumed: 0,
            outputs_produced: 0,
            loss_survival: 1.0,
        }
    }

    pub fn with_loss(loss_survival: f64) -> Self {
        ConsumptionLedger {
            loss_survival,
            ..ConsumptionLedger::new()
        }
    }

    /// Mean quoins per output; defined only once something was produced.
    pub fn mean_quoins_per_output(&self) -> Option<f64> {
        if self.outputs_produced == 0 {
            None
        } else {
            Some(self.quoins_consumed as f64 / self.outputs_produced as f64)
        }
    }

    pub fn absorb(&mut self, other: &ConsumptionLedger) {
        self.quoins_consumed += other.quoins_consumed;
        self.classical_coins_consumed += other.classical_coins_consumed;
        self.outputs_produced += other.outputs_produced;
    }
}

impl Default for ConsumptionLedger {
    fn default() -> Self {
        ConsumptionLedger::new()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MeasBasis {
    /// σ_z measurement; head = |0⟩, probability p.
    Z,
    /// D/A basis; head = |D⟩, probability (1 + 2√(p(1−p)))/2.
    DiagonalAntidiagonal,
}

#[derive(Clone, Debug)]
enum CoinSource {
    Analytic { prob: f64 },
    Quoin { p: f64, basis: MeasBasis },
    Recorded { bits: Vec<bool>, pos: usize },
}

/// A seeded, single-owner source of biased coin flips.
#[derive(Clone, Debug)]
pub struct CoinStream {
    source: CoinSource,
    tosses_consumed: u64,
    rng: ChaCha8Rng,
}

impl CoinStream {
    pub fn analytic(prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::Domain(format!("coin probability {prob} outside [0,1]")));
        }
        Ok(CoinStream {
            source: CoinSource::Analytic { prob },
            tosses_consumed: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// p-coin from measuring a fresh quoin in σ_z.
    pub fn quoin_z(p: f64, seed: u64) -> Result<Self> {
        StateVector::quoin(p)?;
        Ok(CoinStream {
            source: CoinSource::Quoin { p, basis: MeasBasis::Z },
            tosses_consumed: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// q-coin from measuring a fresh quoin in the D/A basis.
    pub fn quoin_da(p: f64, seed: u64) -> Result<Self> {
        StateVector::quoin(p)?;
        Ok(CoinStream {
            source: CoinSource::Quoin {
                p,
                basis: MeasBasis::DiagonalAntidiagonal,
            },
            tosses_consumed: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn recorded(bits: Vec<bool>) -> Self {
        CoinStream {
            source: CoinSource::Recorded { bits, pos: 0 },
            tosses_consumed: 0,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn tosses_consumed(&self) -> u64 {
        self.tosses_consumed
    }

    pub fn toss(&mut self) -> Result<bool> {
        self.tosses_consumed += 1;
        match &mut self.source {
            CoinSource::Analytic { prob } => Ok(self.rng.random_bool(*prob)),
            CoinSource::Quoin { p, basis } => {
                let quoin = StateVector::quoin(*p)?;
                let state = match basis {
                    MeasBasis::Z => quoin,
                    MeasBasis::DiagonalAntidiagonal => {
                        quoin.apply(&Operator::hadamard(), &[0])?
                    }
                };
                Ok(state.sample(&mut self.rng) == 0)
            }
            CoinSource::Recorded { bits, pos } => {
                let bit = bits.get(*pos).copied().ok_or_else(|| {
                    Error::Data("recorded coin stream exhausted".into())
                })?;
                *pos += 1;
                Ok(bit)
            }
        }
    }
}

/// Von Neumann unbiasing: toss twice, output the second toss when the two
/// differ, otherwise repeat. Expected tosses per output: 1/(p(1−p)).
pub fn von_neumann_fair(stream: &mut CoinStream, cap: u64) -> Result<bool> {
    for _ in 0..cap {
        let first = stream.toss()?;
        let second = stream.toss()?;
        if first != second {
            return Ok(second);
        }
    }
    Err(Error::AttemptCap(cap))
}

fn ratio_core(mut toss: impl FnMut() -> Result<bool>, cap: u64) -> Result<bool> {
    for _ in 0..cap {
        if !toss()? {
            return Ok(false);
        }
        if !toss()? {
            return Ok(true);
        }
    }
    Err(Error::AttemptCap(cap))
}

/// From an l-coin, a coin with head probability l/(1+l): toss twice; first
/// toss tail → output tail, second toss tail → output head, otherwise
/// repeat. Expected repeats per output: 1/(1−l²).
pub fn ratio_coin(stream: &mut CoinStream, cap: u64) -> Result<bool> {
    ratio_core(|| stream.toss(), cap)
}

/// Protocol 1 for g(p) = 4p(1−p): single-qubit quantum processing only.
/// A p-coin (σ_z) and a q-coin (D/A) feed doubled-toss m- and n-coins with
/// m = 2p(1−p) and n = 1/2 − 2p(1−p); ratio coins s = m/(m+1), t = n/(n+1)
/// are then compared until (head, tail) or (tail, head) decides the output.
pub fn g_protocol1(p: f64, rng: &mut impl Rng, cap: u64) -> Result<(bool, ConsumptionLedger)> {
    let mut pz = CoinStream::quoin_z(p, rng.random())?;
    let mut qda = CoinStream::quoin_da(p, rng.random())?;
    let mut out = None;
    for _ in 0..cap {
        let s = ratio_core(
            || {
                let a = pz.toss()?;
                let b = pz.toss()?;
                Ok(a != b)
            },
            cap,
        )?;
        let t = ratio_core(
            || {
                let a = qda.toss()?;
                let b = qda.toss()?;
                Ok(a != b)
            },
            cap,
        )?;
        match (s, t) {
            (true, false) => {
                out = Some(true);
                break;
            }
            (false, true) => {
                out = Some(false);
                break;
            }
            _ => continue,
        }
    }
    let head = out.ok_or(Error::AttemptCap(cap))?;
    let mut ledger = ConsumptionLedger::new();
    ledger.quoins_consumed = pz.tosses_consumed() + qda.tosses_consumed();
    ledger.outputs_produced = 1;
    Ok((head, ledger))
}

/// A post-selected coin prepared once per (plan, p): the collapsed output
/// state is deterministic, so each attempt is a single acceptance draw.
#[derive(Clone, Debug)]
pub struct PostSelectedCoin {
    state: StateVector,
    accept_prob: f64,
    quoins_per_attempt: u64,
}

impl PostSelectedCoin {
    pub fn prepare(plan: &CircuitPlan, p: f64, loss_survival: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss_survival) || loss_survival == 0.0 {
            return Err(Error::Domain(format!(
                "loss survival {loss_survival} outside (0,1]"
            )));
        }
        let state = plan.run_numeric(p)?;
        Ok(PostSelectedCoin {
            accept_prob: (state.success_prob() * loss_survival).clamp(0.0, 1.0),
            state,
            quoins_per_attempt: plan.quoins_per_attempt,
        })
    }

    pub fn accept_prob(&self) -> f64 {
        self.accept_prob
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Retries until one attempt is accepted, then samples the output state.
    /// Returns the measured basis outcome and the quoins consumed. The
    /// attempt count is geometric with the prepared acceptance, drawn by
    /// inverse CDF so one output costs one draw regardless of how small the
    /// acceptance is; the attempt cap still applies.
    pub fn sample_output(&self, rng: &mut impl Rng, cap: u64) -> Result<(usize, u64)> {
        if self.accept_prob <= 0.0 {
            return Err(Error::AttemptCap(cap));
        }
        let attempts = if self.accept_prob >= 1.0 {
            1.0
        } else {
            let u: f64 = rng.random(); // in [0, 1)
            ((1.0 - u).ln() / (1.0 - self.accept_prob).ln()).ceil().max(1.0)
        };
        if attempts > cap as f64 {
            return Err(Error::AttemptCap(cap));
        }
        Ok((
            self.state.sample(rng),
            attempts as u64 * self.quoins_per_attempt,
        ))
    }
}

/// Protocol 2 for g(p): build the single-qubit g state and measure σ_z.
pub fn g_protocol2(p: f64, rng: &mut impl Rng, cap: u64) -> Result<(bool, ConsumptionLedger)> {
    let coin = PostSelectedCoin::prepare(&g_state_plan(), p, 1.0)?;
    let (outcome, quoins) = coin.sample_output(rng, cap)?;
    let mut ledger = ConsumptionLedger::new();
    ledger.quoins_consumed = quoins;
    ledger.outputs_produced = 1;
    Ok((outcome == 0, ledger))
}

/// Protocol 3 for g(p): joint measurement of the two-qubit state, head on
/// |01⟩ conditioned on {|01⟩, |10⟩}.
pub fn g_protocol3(p: f64, rng: &mut impl Rng, cap: u64) -> Result<(bool, ConsumptionLedger)> {
    let state = g_joint_plan().run_numeric(p)?;
    let mut ledger = ConsumptionLedger::new();
    for _ in 0..cap {
        ledger.quoins_consumed += 2;
        match state.sample(rng) {
            0b01 => {
                ledger.outputs_produced = 1;
                return Ok((true, ledger));
            }
            0b10 => {
                ledger.outputs_produced = 1;
                return Ok((false, ledger));
            }
            _ => continue,
        }
    }
    Err(Error::AttemptCap(cap))
}

/// Coins needed to construct one l(p)-coin with truncation error eps:
/// n ≈ −(1/eps²)·ln(eps²/36).
pub fn doubling_cost_estimate(eps: f64) -> f64 {
    assert!(eps > 0.0, "truncation level must be positive");
    -(eps * eps / 36.0).ln() / (eps * eps)
}

/// Cost breakdown for the classical construction of the truncated example
/// coin f_ct.
#[derive(Clone, Debug, Serialize)]
pub struct FctCostBreakdown {
    /// Classical coins per l(p)-coin (doubling-sampler estimate).
    pub per_l_coin: f64,
    /// Truncated l(p) = max((2p−1)², 2·eps_c).
    pub l_value: f64,
    /// Average l-coin tosses per f_ct output: 2/(1−l)²; ∞ at l = 1.
    pub l_tosses: f64,
    pub total: f64,
}

/// Classical coin count for one f_ct(p) output at truncation level eps_c.
pub fn classical_fct_cost(p: f64, eps_c: f64) -> FctCostBreakdown {
    let per_l_coin = doubling_cost_estimate(eps_c);
    let d = 2.0 * p - 1.0;
    let l_value = (d * d).max(2.0 * eps_c);
    let l_tosses = if l_value >= 1.0 {
        f64::INFINITY
    } else {
        2.0 / ((1.0 - l_value) * (1.0 - l_value))
    };
    FctCostBreakdown {
        per_l_coin,
        l_value,
        l_tosses,
        total: per_l_coin * l_tosses,
    }
}

/// Quoin cost of the example coin, measured and predicted.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumCostReport {
    pub mean_quoins_per_coin: f64,
    pub predicted: f64,
    pub outputs: u64,
}

/// Monte Carlo mean quoins per successful example-coin output, with loss
/// modeled as an independent per-attempt survival factor. Predicted value:
/// 2/(Pr_c(p)·loss).
pub fn quantum_cost_report(
    p: f64,
    loss_survival: f64,
    rng: &mut impl Rng,
    outputs: u64,
) -> Result<QuantumCostReport> {
    let coin = PostSelectedCoin::prepare(&example_coin_plan(), p, loss_survival)?;
    let mut quoins = 0u64;
    for _ in 0..outputs {
        let (_, used) = coin.sample_output(rng, DEFAULT_ATTEMPT_CAP)?;
        quoins += used;
    }
    Ok(QuantumCostReport {
        mean_quoins_per_coin: quoins as f64 / outputs as f64,
        predicted: 2.0 / (example_coin_success_prob(p) * loss_survival),
        outputs,
    })
}

/// Side-by-side quantum vs classical consumption for one output coin.
#[derive(Clone, Debug, Serialize)]
pub struct AdvantageReport {
    pub p: f64,
    pub eps_c: f64,
    pub loss_survival: f64,
    pub quantum: QuantumCostReport,
    pub classical: FctCostBreakdown,
    /// classical total / predicted quantum cost
    pub ratio: f64,
}

pub fn advantage_compare(
    p: f64,
    eps_c: f64,
    loss_survival: f64,
    rng: &mut impl Rng,
    outputs: u64,
) -> Result<AdvantageReport> {
    let quantum = quantum_cost_report(p, loss_survival, rng, outputs)?;
    let classical = classical_fct_cost(p, eps_c);
    let ratio = classical.total / quantum.predicted;
    Ok(AdvantageReport {
        p,
        eps_c,
        loss_survival,
        quantum,
        classical,
        ratio,
    })
}
