//! Report rows and CSV/JSON emission.
//!
//! Every numeric cell is rounded to 12 significant digits before emission,
//! so CSV and JSON carry identical values and files are byte-identical
//! across runs with the same configuration and seed. Non-finite values
//! (e.g. the diverging classical toss factor at l = 1) appear as `inf` in
//! CSV and `null` in JSON.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{}", sig12(x))
    }
}

fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(sig12(x))
    } else {
        Value::Null
    }
}

/// One sweep row: theoretical value, Monte Carlo estimate with its binomial
/// standard deviation, per-attempt acceptance probability, and measured
/// quoin consumption.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub theoretical: f64,
    pub estimate: f64,
    pub stddev: f64,
    pub success_prob: f64,
    pub quoins_mean: f64,
    pub seed: u64,
}

pub const SWEEP_HEADER: &str = "p,theoretical,estimate,stddev,success_prob,quoins_mean,seed";

/// One cost row: predicted and measured quantum consumption against the
/// classical doubling-protocol total.
#[derive(Clone, Debug, Serialize)]
pub struct CostRow {
    pub p: f64,
    pub quantum_predicted: f64,
    pub quantum_empirical: f64,
    pub classical_per_l_coin: f64,
    pub classical_l_tosses: f64,
    pub classical_total: f64,
    pub ratio: f64,
    pub seed: u64,
}

pub const COST_HEADER: &str = "p,quantum_predicted,quantum_empirical,classical_per_l_coin,classical_l_tosses,classical_total,ratio,seed";

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub trait ReportRow {
    fn csv_line(&self) -> String;
    fn json_value(&self) -> Value;
}

impl ReportRow for SweepRow {
    fn csv_line(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{}",
            cell(self.p),
            cell(self.theoretical),
            cell(self.estimate),
            cell(self.stddev),
            cell(self.success_prob),
            cell(self.quoins_mean),
            self.seed
        );
        line
    }

    fn json_value(&self) -> Value {
        json!({
            "p": jnum(self.p),
            "theoretical": jnum(self.theoretical),
            "estimate": jnum(self.estimate),
            "stddev": jnum(self.stddev),
            "success_prob": jnum(self.success_prob),
            "quoins_mean": jnum(self.quoins_mean),
            "seed": self.seed,
        })
    }
}

impl ReportRow for CostRow {
    fn csv_line(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{}",
            cell(self.p),
            cell(self.quantum_predicted),
            cell(self.quantum_empirical),
            cell(self.classical_per_l_coin),
            cell(self.classical_l_tosses),
            cell(self.classical_total),
            cell(self.ratio),
            self.seed
        );
        line
    }

    fn json_value(&self) -> Value {
        json!({
            "p": jnum(self.p),
            "quantum_predicted": jnum(self.quantum_predicted),
            "quantum_empirical": jnum(self.quantum_empirical),
            "classical_per_l_coin": jnum(self.classical_per_l_coin),
            "classical_l_tosses": jnum(self.classical_l_tosses),
            "classical_total": jnum(self.classical_total),
            "ratio": jnum(self.ratio),
            "seed": self.seed,
        })
    }
}

/// Renders rows in the requested format; rows must be nonempty.
pub fn render_report<R: ReportRow>(
    rows: &[R],
    header: &str,
    format: Format,
) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Data("no rows to report".into()));
    }
    match format {
        Format::Csv => {
            let mut out = String::with_capacity(rows.len() * 64);
            out.push_str(header);
            out.push('\n');
            for row in rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let values: Vec<Value> = rows.iter().map(|r| r.json_value()).collect();
            let mut out = serde_json::to_string_pretty(&values).expect("json rows");
            out.push('\n');
            Ok(out)
        }
    }
}

/// Parses a 4×4 truth table from CSV text: a header line of input labels and
/// four data lines of `output_label,c1,c2,c3,c4`.
pub fn parse_truth_table_csv(text: &str) -> Result<[[u64; 4]; 4], CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut counts = [[0u64; 4]; 4];
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(format!("bad truth-table CSV: {e}")))?;
        if rows >= 4 {
            return Err(CliError::Data("truth table needs exactly 4 count rows".into()));
        }
        if record.len() != 5 {
            return Err(CliError::Data(format!(
                "truth-table row {} has {} fields, expected 5",
                rows + 1,
                record.len()
            )));
        }
        for col in 0..4 {
            counts[rows][col] = record[col + 1]
                .parse()
                .map_err(|_| CliError::Data(format!("bad count `{}`", &record[col + 1])))?;
        }
        rows += 1;
    }
    if rows != 4 {
        return Err(CliError::Data(format!(
            "truth table needs exactly 4 count rows, found {rows}"
        )));
    }
    Ok(counts)
}
