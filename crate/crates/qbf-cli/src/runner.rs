//! Sweep execution: grid construction, per-trial seed derivation, and the
//! worker pool.
//!
//! Every Monte Carlo trial draws from its own generator derived as
//! splitmix64-chain(master seed, subcommand label, point index, trial
//! index), so results are identical for any worker count and any
//! scheduling. Rows are assembled in grid order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qbf_core::classical::{
    advantage_compare, g_protocol1, g_protocol3, PostSelectedCoin,
};
use qbf_core::coin::f_a_eval;
use qbf_core::constructor::circuits::{example_coin_plan, g_state_plan};
use qbf_core::constructor::{synthesize_single, CircuitPlan, DEFAULT_ATTEMPT_CAP};
use qbf_core::rng::{derive_rng, label_tag};
use qbf_core::SymbolicState;

use crate::report::{sig12, CostRow, SweepRow};
use crate::CliError;

/// Inclusive p grid from start to stop in the given step.
pub fn build_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop < start {
        return Err(CliError::Config(format!(
            "grid [{start}, {stop}] must sit inside [0,1]"
        )));
    }
    if step <= 0.0 {
        return Err(CliError::Config(format!("step {step} must be positive")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    let points = (0..=count)
        .map(|i| sig12((start + i as f64 * step).min(1.0)))
        .collect();
    Ok(points)
}

/// Runs `count` independent jobs over `workers` threads, collecting results
/// in index order.
pub fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
    let failure: Mutex<Option<CliError>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count || failure.lock().unwrap().is_some() {
                    break;
                }
                match job(i) {
                    Ok(v) => slots.lock().unwrap()[i] = Some(v),
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|s| s.expect("all slots filled"))
        .collect())
}

/// A sweep target: one of the named coins or a synthesized expression.
pub enum CoinKind {
    /// f_c(p) = (2p−1)²/(1+(2p−1)²) via the photonic example-coin circuit.
    Fc,
    /// g(p) = 4p(1−p), protocol 1 (single-qubit processing + classical).
    G1,
    /// g(p), protocol 2 (g state, σ_z measurement).
    G2,
    /// g(p), protocol 3 (joint measurement conditioned on {01, 10}).
    G3,
    /// f_a(p) from the single-unitary factory.
    Fa(f64),
    /// σ_z head probability |h(p)|²/(1+|h(p)|²) of a synthesized state.
    Expr {
        plan: CircuitPlan,
        symbolic: SymbolicState,
    },
}

impl CoinKind {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "fc" => Ok(CoinKind::Fc),
            "g1" => Ok(CoinKind::G1),
            "g2" => Ok(CoinKind::G2),
            "g3" => Ok(CoinKind::G3),
            _ => {
                if let Some(a) = name.strip_prefix("fa:") {
                    let a: f64 = a
                        .parse()
                        .map_err(|_| CliError::Config(format!("bad f_a parameter in `{name}`")))?;
                    if !(0.0..=1.0).contains(&a) {
                        return Err(CliError::Config(format!("f_a parameter {a} outside [0,1]")));
                    }
                    Ok(CoinKind::Fa(a))
                } else {
                    Err(CliError::Config(format!(
                        "unknown coin `{name}` (expected fc|g1|g2|g3|fa:<a>)"
                    )))
                }
            }
        }
    }

    pub fn from_expression(text: &str) -> Result<Self, CliError> {
        let ast = crate::expr::parse_expression(text)
            .map_err(|e| CliError::Config(format!("bad expression: {e}")))?;
        let tree = crate::expr::lower(&ast);
        let synth = synthesize_single(&tree)
            .map_err(|e| CliError::Config(format!("expression not synthesizable: {e}")))?;
        Ok(CoinKind::Expr {
            plan: synth.plan,
            symbolic: synth.state,
        })
    }

    pub fn theoretical(&self, p: f64) -> Result<f64, CliError> {
        match self {
            CoinKind::Fc => {
                let d = 2.0 * p - 1.0;
                Ok(d * d / (1.0 + d * d))
            }
            CoinKind::G1 | CoinKind::G2 | CoinKind::G3 => Ok(4.0 * p * (1.0 - p)),
            CoinKind::Fa(a) => Ok(f_a_eval(*a, p)),
            CoinKind::Expr { symbolic, .. } => {
                let h = symbolic
                    .rel_amp_at(p)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                Ok(h.norm_sqr() / (1.0 + h.norm_sqr()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub shots: u64,
    pub seed: u64,
    pub loss_survival: f64,
    pub workers: usize,
}

/// Monte Carlo sweep of one coin over the grid.
pub fn run_sweep(
    kind: &CoinKind,
    grid: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>, CliError> {
    if cfg.shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    if !(cfg.loss_survival > 0.0 && cfg.loss_survival <= 1.0) {
        return Err(CliError::Config(format!(
            "loss survival {} outside (0,1]",
            cfg.loss_survival
        )));
    }
    let tag = label_tag("coin");
    run_indexed(grid.len(), cfg.workers, |idx| {
        sweep_point(kind, grid[idx], idx, tag, cfg)
    })
}

fn sweep_point(
    kind: &CoinKind,
    p: f64,
    point_idx: usize,
    tag: u64,
    cfg: &SweepConfig,
) -> Result<SweepRow, CliError> {
    let data_err = |e: qbf_core::Error| CliError::Data(format!("p = {p}: {e}"));

    // coins with a prepared post-selected circuit
    let prepared = match kind {
        CoinKind::Fc => Some(
            PostSelectedCoin::prepare(&example_coin_plan(), p, cfg.loss_survival)
                .map_err(data_err)?,
        ),
        CoinKind::G2 => {
            Some(PostSelectedCoin::prepare(&g_state_plan(), p, 1.0).map_err(data_err)?)
        }
        CoinKind::Expr { plan, .. } => {
            Some(PostSelectedCoin::prepare(plan, p, cfg.loss_survival).map_err(data_err)?)
        }
        _ => None,
    };
    let success_prob = match (kind, &prepared) {
        (CoinKind::G1, _) | (CoinKind::Fa(_), _) => 1.0,
        (CoinKind::G3, _) => 0.5,
        (_, Some(c)) => c.accept_prob(),
        _ => unreachable!(),
    };

    let mut heads = 0u64;
    let mut quoins = 0u64;
    for trial in 0..cfg.shots {
        let mut rng = derive_rng(cfg.seed, &[tag, point_idx as u64, trial]);
        let (head, used) = match kind {
            CoinKind::Fc | CoinKind::G2 | CoinKind::Expr { .. } => {
                let coin = prepared.as_ref().unwrap();
                let (outcome, used) = coin
                    .sample_output(&mut rng, DEFAULT_ATTEMPT_CAP)
                    .map_err(data_err)?;
                (outcome == 0, used)
            }
            CoinKind::G1 => {
                let (head, ledger) =
                    g_protocol1(p, &mut rng, DEFAULT_ATTEMPT_CAP).map_err(data_err)?;
                (head, ledger.quoins_consumed)
            }
            CoinKind::G3 => {
                let (head, ledger) =
                    g_protocol3(p, &mut rng, DEFAULT_ATTEMPT_CAP).map_err(data_err)?;
                (head, ledger.quoins_consumed)
            }
            CoinKind::Fa(a) => {
                let state = qbf_core::StateVector::quoin(p)
                    .and_then(|q| q.apply(&qbf_core::Operator::u_a(*a)?, &[0]))
                    .map_err(data_err)?;
                (state.sample(&mut rng) == 1, 1)
            }
        };
        if head {
            heads += 1;
        }
        quoins += used;
    }

    let estimate = heads as f64 / cfg.shots as f64;
    Ok(SweepRow {
        p,
        theoretical: kind.theoretical(p)?,
        estimate,
        stddev: (estimate * (1.0 - estimate) / cfg.shots as f64).sqrt(),
        success_prob,
        quoins_mean: quoins as f64 / cfg.shots as f64,
        seed: cfg.seed,
    })
}

/// Quantum-vs-classical consumption report over the grid.
pub fn run_cost(
    grid: &[f64],
    eps_c: f64,
    cfg: &SweepConfig,
) -> Result<Vec<CostRow>, CliError> {
    if cfg.shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    if !(eps_c > 0.0 && eps_c < 0.5) {
        return Err(CliError::Config(format!(
            "truncation level {eps_c} outside (0, 0.5)"
        )));
    }
    let tag = label_tag("cost");
    run_indexed(grid.len(), cfg.workers, |idx| {
        let p = grid[idx];
        let mut rng = derive_rng(cfg.seed, &[tag, idx as u64]);
        let report = advantage_compare(p, eps_c, cfg.loss_survival, &mut rng, cfg.shots)
            .map_err(|e| CliError::Data(format!("p = {p}: {e}")))?;
        Ok(CostRow {
            p,
            quantum_predicted: report.quantum.predicted,
            quantum_empirical: report.quantum.mean_quoins_per_coin,
            classical_per_l_coin: report.classical.per_l_coin,
            classical_l_tosses: report.classical.l_tosses,
            classical_total: report.classical.total,
            ratio: report.ratio,
            seed: cfg.seed,
        })
    })
}
