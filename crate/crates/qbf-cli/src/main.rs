//! qbf: a laboratory for quantum Bernoulli factories.
//!
//! Subcommands:
//! - `construct` compiles an amplitude expression into a circuit plan.
//! - `coin` sweeps a coin over a p grid with Monte Carlo estimates.
//! - `cost` compares quantum and classical consumption per output coin.
//! - `fidelity` ingests or simulates C-NOT truth tables.
//! - `check` runs classical/quantum feasibility verdicts on a coin.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error.

mod expr;
mod report;
mod runner;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qbf_core::coin::{
    cbf_check, constant_coin_function, doubling_coin_function, example_coin_function,
    extend_common_zeros, fa_coin_function, g2_coin_function, g3_coin_function, spb_check,
    CoinFunction,
};
use qbf_core::fidelity::{
    average_fidelity, process_fidelity_bounds, simulate_truth_table, BasisPair, TruthTable,
};
use qbf_core::rng::{derive_rng, label_tag};
use qbf_core::Operator;

use report::{render_report, Format, COST_HEADER, SWEEP_HEADER};
use runner::{build_grid, run_cost, run_sweep, CoinKind, SweepConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "qbf", version, about = "quantum Bernoulli factory laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// First p of the sweep grid
    #[arg(long, default_value_t = 0.0)]
    p_start: f64,
    /// Last p of the sweep grid (inclusive)
    #[arg(long, default_value_t = 1.0)]
    p_stop: f64,
    /// Grid step
    #[arg(long, default_value_t = 0.1)]
    p_step: f64,
    /// Master seed for all per-trial generators
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (results are identical for any value)
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an amplitude expression into a circuit plan
    Construct {
        /// Expression over p, s, complex constants with + - * / and parens
        #[arg(long)]
        expr: String,
        /// Optionally evaluate the construction at this bias
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo sweep of a coin over a p grid
    Coin {
        /// Named coin: fc | g1 | g2 | g3 | fa:<a>
        #[arg(long)]
        coin: Option<String>,
        /// Amplitude expression defining the coin |h|²/(1+|h|²)
        #[arg(long)]
        expr: Option<String>,
        /// Accepted outputs per grid point
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Transmission survival per attempt (photonic circuits)
        #[arg(long, default_value_t = 1.0)]
        loss: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Quantum vs classical consumption per output coin
    Cost {
        /// Classical truncation level ε_c
        #[arg(long, default_value_t = 0.0221)]
        eps_c: f64,
        /// Transmission survival per attempt
        #[arg(long, default_value_t = 1.0)]
        loss: f64,
        /// Measured quantum outputs per grid point
        #[arg(long, default_value_t = 2_000)]
        shots: u64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Truth-table fidelities and Hofmann process-fidelity bounds
    Fidelity {
        /// CSV of HV-basis coincidence counts
        #[arg(long)]
        ingest_hv: Option<PathBuf>,
        /// CSV of DA-basis coincidence counts
        #[arg(long)]
        ingest_da: Option<PathBuf>,
        /// Simulate a noisy truth table instead of ingesting
        #[arg(long, default_value_t = false)]
        simulate: bool,
        /// Basis pair for --simulate: hv or da
        #[arg(long)]
        basis: Option<String>,
        /// Depolarizing mixture weight for --simulate
        #[arg(long, default_value_t = 0.0)]
        noise_lambda: f64,
        #[arg(long, default_value_t = 2_000)]
        shots_per_column: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Feasibility verdicts: Keane–O'Brien (cbf) or simple-and-poly-bounded (spb)
    Check {
        /// Coin under test: fc | g2 | g3 | fa:<a> | fand | half
        #[arg(long)]
        target: String,
        /// cbf or spb
        #[arg(long)]
        kind: String,
        /// Apply the common-zero extension before checking
        #[arg(long, default_value_t = false)]
        extend: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Data(_) => ExitCode::from(3),
            }
        }
    }
}

fn parse_format(name: &str) -> Result<Format, CliError> {
    match name {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Config(format!("unknown format `{other}`"))),
    }
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn workers_or_default(w: Option<usize>) -> usize {
    w.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct { expr, p, out } => {
            let ast = expr::parse_expression(&expr)
                .map_err(|e| CliError::Config(format!("bad expression: {e}")))?;
            let tree = expr::lower(&ast);
            let synth = qbf_core::constructor::synthesize_single(&tree)
                .map_err(|e| CliError::Config(format!("expression not synthesizable: {e}")))?;
            let mut doc = json!({
                "expression": expr::print_expression(&ast),
                "relative_amplitude": synth.value.to_string(),
                "quoins_per_attempt": synth.plan.quoins_per_attempt,
                "plan": serde_json::to_value(&synth.plan).expect("plan json"),
            });
            if let Some(p) = p {
                let state = synth
                    .plan
                    .run_numeric(p)
                    .map_err(|e| CliError::Data(format!("p = {p}: {e}")))?;
                let h = synth
                    .state
                    .rel_amp_at(p)
                    .map_err(|e| CliError::Data(format!("p = {p}: {e}")))?;
                doc["at"] = json!({
                    "p": p,
                    "relative_amplitude": [report::sig12(h.re), report::sig12(h.im)],
                    "success_prob": report::sig12(state.success_prob()),
                });
            }
            emit(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()), out.as_ref())
        }
        Command::Coin {
            coin,
            expr,
            shots,
            loss,
            grid,
        } => {
            let kind = match (coin, expr) {
                (Some(name), None) => CoinKind::parse(&name)?,
                (None, Some(text)) => CoinKind::from_expression(&text)?,
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("choose either --coin or --expr".into()))
                }
                (None, None) => {
                    return Err(CliError::Config("one of --coin or --expr is required".into()))
                }
            };
            let points = build_grid(grid.p_start, grid.p_stop, grid.p_step)?;
            let cfg = SweepConfig {
                shots,
                seed: grid.seed,
                loss_survival: loss,
                workers: workers_or_default(grid.workers),
            };
            let rows = run_sweep(&kind, &points, &cfg)?;
            let text = render_report(&rows, SWEEP_HEADER, parse_format(&grid.format)?)?;
            emit(text, grid.out.as_ref())
        }
        Command::Cost {
            eps_c,
            loss,
            shots,
            grid,
        } => {
            let points = build_grid(grid.p_start, grid.p_stop, grid.p_step)?;
            let cfg = SweepConfig {
                shots,
                seed: grid.seed,
                loss_survival: loss,
                workers: workers_or_default(grid.workers),
            };
            if !(loss > 0.0 && loss <= 1.0) {
                return Err(CliError::Config(format!("loss survival {loss} outside (0,1]")));
            }
            let rows = run_cost(&points, eps_c, &cfg)?;
            let text = render_report(&rows, COST_HEADER, parse_format(&grid.format)?)?;
            emit(text, grid.out.as_ref())
        }
        Command::Fidelity {
            ingest_hv,
            ingest_da,
            simulate,
            basis,
            noise_lambda,
            shots_per_column,
            seed,
            out,
        } => {
            if simulate {
                if ingest_hv.is_some() || ingest_da.is_some() {
                    return Err(CliError::Config(
                        "--simulate cannot be combined with ingestion".into(),
                    ));
                }
                let basis = match basis.as_deref() {
                    Some("hv") => BasisPair::Hv,
                    Some("da") => BasisPair::Da,
                    Some(other) => {
                        return Err(CliError::Config(format!("unknown basis `{other}`")))
                    }
                    None => return Err(CliError::Config("--simulate needs --basis".into())),
                };
                let mut rng = derive_rng(seed, &[label_tag("fidelity")]);
                let table = simulate_truth_table(
                    &Operator::cnot(),
                    noise_lambda,
                    shots_per_column,
                    basis,
                    &mut rng,
                )
                .map_err(|e| CliError::Data(e.to_string()))?;
                let fidelity = table
                    .classical_fidelity()
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let doc = json!({
                    "simulated": {
                        "noise_lambda": noise_lambda,
                        "shots_per_column": shots_per_column,
                        "seed": seed,
                    },
                    "table": serde_json::to_value(&table).unwrap(),
                    "classical_fidelity": report::sig12(fidelity),
                });
                return emit(
                    format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
                    out.as_ref(),
                );
            }
            let load = |path: &PathBuf, basis: BasisPair| -> Result<TruthTable, CliError> {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
                Ok(TruthTable::cnot(basis, report::parse_truth_table_csv(&text)?))
            };
            let hv = ingest_hv
                .as_ref()
                .map(|path| load(path, BasisPair::Hv))
                .transpose()?;
            let da = ingest_da
                .as_ref()
                .map(|path| load(path, BasisPair::Da))
                .transpose()?;
            let fid = |t: &TruthTable| -> Result<f64, CliError> {
                t.classical_fidelity().map_err(|e| CliError::Data(e.to_string()))
            };
            let doc = match (&hv, &da) {
                (Some(hv), Some(da)) => {
                    let f_hv = fid(hv)?;
                    let f_da = fid(da)?;
                    let (lower, upper) = process_fidelity_bounds(f_hv, f_da);
                    json!({
                        "f_hv": report::sig12(f_hv),
                        "f_da": report::sig12(f_da),
                        "process_fidelity": {
                            "lower": report::sig12(lower),
                            "upper": report::sig12(upper),
                        },
                        "average_fidelity": {
                            "lower": report::sig12(average_fidelity(lower, 4)),
                            "upper": report::sig12(average_fidelity(upper, 4)),
                        },
                    })
                }
                (Some(hv), None) => json!({ "f_hv": report::sig12(fid(hv)?) }),
                (None, Some(da)) => json!({ "f_da": report::sig12(fid(da)?) }),
                (None, None) => {
                    return Err(CliError::Config(
                        "provide --ingest-hv/--ingest-da or --simulate".into(),
                    ))
                }
            };
            emit(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()), out.as_ref())
        }
        Command::Check {
            target,
            kind,
            extend,
            out,
        } => {
            let coin = named_coin(&target)?;
            let coin = if extend {
                extend_common_zeros(&coin).map_err(|e| CliError::Data(e.to_string()))?
            } else {
                coin
            };
            let doc = match kind.as_str() {
                "cbf" => {
                    let verdict = cbf_check(&coin).map_err(|e| CliError::Data(e.to_string()))?;
                    json!({ "target": target, "kind": "cbf",
                            "verdict": serde_json::to_value(&verdict).unwrap() })
                }
                "spb" => {
                    let verdict = spb_check(&coin).map_err(|e| CliError::Data(e.to_string()))?;
                    json!({ "target": target, "kind": "spb",
                            "verdict": serde_json::to_value(&verdict).unwrap() })
                }
                other => return Err(CliError::Config(format!("unknown check kind `{other}`"))),
            };
            emit(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()), out.as_ref())
        }
    }
}

fn named_coin(name: &str) -> Result<CoinFunction, CliError> {
    let data_err = |e: qbf_core::Error| CliError::Data(e.to_string());
    match name {
        "fc" => example_coin_function().map_err(data_err),
        "g2" => g2_coin_function().map_err(data_err),
        "g3" => g3_coin_function().map_err(data_err),
        "fand" => doubling_coin_function().map_err(data_err),
        "half" => constant_coin_function(0.5).map_err(data_err),
        _ => {
            if let Some(a) = name.strip_prefix("fa:") {
                let a: f64 = a
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad f_a parameter in `{name}`")))?;
                fa_coin_function(a).map_err(data_err)
            } else {
                Err(CliError::Config(format!(
                    "unknown target `{name}` (expected fc|g2|g3|fa:<a>|fand|half)"
                )))
            }
        }
    }
}
