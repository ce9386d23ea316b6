//! Truth-table fidelity calculus and the Hofmann process-fidelity bounds.
//!
//! A truth table holds 4×4 coincidence counts (columns = inputs, rows =
//! outputs) in one basis pair together with the expected output permutation.
//! Classical fidelity is the mean, over inputs, of the probability of the
//! expected output with each column normalized independently. Two tables in
//! complementary bases bound the process fidelity via
//! F_HV + F_DA − 1 ≤ F_P ≤ min(F_HV, F_DA).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Operator, StateVector};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPair {
    Hv,
    Da,
}

impl BasisPair {
    pub fn labels(&self) -> [&'static str; 4] {
        match self {
            BasisPair::Hv => ["HH", "HV", "VH", "VV"],
            BasisPair::Da => ["DD", "DA", "AD", "AA"],
        }
    }

    /// Expected output permutation of an ideal C-NOT in this basis pair:
    /// HV: HH→HH, HV→HV, VH→VV, VV→VH; DA: DD→DD, DA→AA, AD→AD, AA→DA.
    pub fn cnot_map(&self) -> [usize; 4] {
        match self {
            BasisPair::Hv => [0, 1, 3, 2],
            BasisPair::Da => [0, 3, 2, 1],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruthTable {
    pub basis_label: String,
    /// counts[output][input]
    pub counts: [[u64; 4]; 4],
    /// expected_map[input] = expected output index
    pub expected_map: [usize; 4],
}

impl TruthTable {
    pub fn new(basis_label: impl Into<String>, counts: [[u64; 4]; 4], expected_map: [usize; 4]) -> Self {
        TruthTable {
            basis_label: basis_label.into(),
            counts,
            expected_map,
        }
    }

    /// A C-NOT truth table in the given basis pair.
    pub fn cnot(basis: BasisPair, counts: [[u64; 4]; 4]) -> Self {
        TruthTable::new(
            match basis {
                BasisPair::Hv => "HV",
                BasisPair::Da => "DA",
            },
            counts,
            basis.cnot_map(),
        )
    }

    /// Mean over inputs of the probability of the expected output; each
    /// column is normalized by its own total.
    pub fn classical_fidelity(&self) -> Result<f64> {
        let mut acc = 0.0;
        for input in 0..4 {
            let total: u64 = (0..4).map(|out| self.counts[out][input]).sum();
            if total == 0 {
                return Err(Error::Data(format!(
                    "truth table column {input} has zero total counts"
                )));
            }
            acc += self.counts[self.expected_map[input]][input] as f64 / total as f64;
        }
        Ok(acc / 4.0)
    }
}

/// Hofmann bounds on the process fidelity from two truth-table fidelities in
/// complementary bases; the lower bound is clamped at 0.
pub fn process_fidelity_bounds(f_hv: f64, f_da: f64) -> (f64, f64) {
    ((f_hv + f_da - 1.0).max(0.0), f_hv.min(f_da))
}

/// Average gate fidelity (N·F_P + 1)/(N + 1), with N the Hilbert-space
/// dimension (4 for two qubits).
pub fn average_fidelity(f_p: f64, dim_n: u32) -> f64 {
    let n = dim_n as f64;
    (n * f_p + 1.0) / (n + 1.0)
}

/// State fidelity from coincidence counts parallel and orthogonal to the
/// expected output, with the binomial standard deviation
/// √(F(1−F)/(cc_∥+cc_⊥)).
pub fn state_fidelity_from_counts(cc_parallel: u64, cc_perp: u64) -> Result<(f64, f64)> {
    let total = cc_parallel + cc_perp;
    if total == 0 {
        return Err(Error::Data("no coincidence counts".into()));
    }
    let f = cc_parallel as f64 / total as f64;
    Ok((f, (f * (1.0 - f) / total as f64).sqrt()))
}

/// Simulates a truth-table measurement of a two-qubit gate: each input basis
/// state is prepared in the chosen basis pair, sent through the gate,
/// measured in the same basis, and the outcome distribution is mixed with
/// the uniform one at weight `noise_lambda` (a depolarizing surrogate).
/// λ = 0 reproduces the ideal permutation table.
pub fn simulate_truth_table(
    gate: &Operator,
    noise_lambda: f64,
    shots_per_column: u64,
    basis: BasisPair,
    rng: &mut impl Rng,
) -> Result<TruthTable> {
    if gate.qubits() != 2 {
        return Err(Error::DimensionMismatch("truth tables need a two-qubit gate".into()));
    }
    if !(0.0..=1.0).contains(&noise_lambda) {
        return Err(Error::Domain(format!("noise weight {noise_lambda} outside [0,1]")));
    }
    let h = Operator::hadamard();
    let mut counts = [[0u64; 4]; 4];
    let mut expected_map = [0usize; 4];
    for input in 0..4 {
        let mut st = StateVector::basis(2, input)?;
        if basis == BasisPair::Da {
            st = st.apply(&h, &[0])?.apply(&h, &[1])?;
        }
        st = st.apply(gate, &[0, 1])?;
        if basis == BasisPair::Da {
            st = st.apply(&h, &[0])?.apply(&h, &[1])?;
        }
        let ideal: Vec<f64> = st.amps().iter().map(|a| a.norm_sqr()).collect();
        let (best, best_p) = ideal
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, v)| (i, *v))
            .unwrap();
        if best_p < 0.999 {
            return Err(Error::Data(format!(
                "gate {} is not a basis permutation in the {:?} pair",
                gate.name(),
                basis
            )));
        }
        expected_map[input] = best;
        let mixed: Vec<f64> = ideal
            .iter()
            .map(|p| (1.0 - noise_lambda) * p + noise_lambda * 0.25)
            .collect();
        for _ in 0..shots_per_column {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut outcome = 3;
            for (i, p) in mixed.iter().enumerate() {
                acc += p;
                if u < acc {
                    outcome = i;
                    break;
                }
            }
            counts[outcome][input] += 1;
        }
    }
    Ok(TruthTable::new(
        match basis {
            BasisPair::Hv => "HV",
            BasisPair::Da => "DA",
        },
        counts,
        expected_map,
    ))
}

/// The published C-NOT coincidence-count tables used as fixtures.
pub mod fixtures {
    /// HV-basis counts: rows = outputs HH,HV,VH,VV; columns = inputs.
    pub const CNOT_HV_COUNTS: [[u64; 4]; 4] = [
        [2061, 41, 7, 0],
        [41, 1826, 3, 16],
        [14, 15, 39, 1966],
        [15, 7, 2065, 26],
    ];

    /// DA-basis counts: rows = outputs DD,DA,AD,AA; columns = inputs.
    pub const CNOT_DA_COUNTS: [[u64; 4]; 4] = [
        [1580, 5, 105, 12],
        [12, 100, 0, 2060],
        [95, 7, 2132, 6],
        [3, 1939, 13, 117],
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    #[test]
    fn fixture_fidelities_match_published_percentages() {
        let hv = TruthTable::cnot(BasisPair::Hv, fixtures::CNOT_HV_COUNTS);
        let da = TruthTable::cnot(BasisPair::Da, fixtures::CNOT_DA_COUNTS);
        let f_hv = hv.classical_fidelity().unwrap();
        let f_da = da.classical_fidelity().unwrap();
        assert!((f_hv * 100.0 - 97.24).abs() < 5e-3, "F_HV = {f_hv}");
        assert!((f_da * 100.0 - 94.16).abs() < 5e-3, "F_DA = {f_da}");

        let (lo, hi) = process_fidelity_bounds(f_hv, f_da);
        assert!((lo * 100.0 - 91.40).abs() < 5e-3);
        assert!((hi * 100.0 - 94.16).abs() < 5e-3);
        assert!((average_fidelity(lo, 4) * 100.0 - 93.12).abs() < 5e-3);
        assert!((average_fidelity(hi, 4) * 100.0 - 95.33).abs() < 5e-3);
    }

    #[test]
    fn identity_table_is_perfect() {
        let mut counts = [[0u64; 4]; 4];
        for (i, row) in counts.iter_mut().enumerate() {
            row[i] = 100;
        }
        let t = TruthTable::new("HV", counts, [0, 1, 2, 3]);
        assert!((t.classical_fidelity().unwrap() - 1.0).abs() < 1e-15);
        let mut zero_col = counts;
        for row in &mut zero_col {
            row[2] = 0;
        }
        assert!(TruthTable::new("HV", zero_col, [0, 1, 2, 3])
            .classical_fidelity()
            .is_err());
    }

    #[test]
    fn bounds_edges() {
        assert_eq!(process_fidelity_bounds(1.0, 1.0), (1.0, 1.0));
        let (lo, hi) = process_fidelity_bounds(0.5, 0.4);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.4).abs() < 1e-15);
        assert!((average_fidelity(1.0, 4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn state_fidelity_examples() {
        let (f, _) = state_fidelity_from_counts(514, 20).unwrap();
        assert!((f * 100.0 - 96.255).abs() < 5e-3);
        let (f, sd) = state_fidelity_from_counts(1086, 3).unwrap();
        assert!((f * 100.0 - 99.725).abs() < 5e-3);
        assert!(sd > 0.0);
        let (f, sd) = state_fidelity_from_counts(777, 0).unwrap();
        assert_eq!(f, 1.0);
        assert_eq!(sd, 0.0);
        assert!(state_fidelity_from_counts(0, 0).is_err());
    }

    #[test]
    fn ideal_simulation_reproduces_permutations() {
        let mut rng = derive_rng(41, &[]);
        for basis in [BasisPair::Hv, BasisPair::Da] {
            let t = simulate_truth_table(&Operator::cnot(), 0.0, 500, basis, &mut rng).unwrap();
            assert_eq!(t.expected_map, basis.cnot_map());
            assert!((t.classical_fidelity().unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn calibrated_noise_matches_target_fidelity() {
        // 1 − (3/4)λ = 0.9724 at λ = 0.0368
        let lambda = 0.0368;
        let want = 1.0 - 0.75 * lambda;
        let mut rng = derive_rng(42, &[]);
        let t =
            simulate_truth_table(&Operator::cnot(), lambda, 20_000, BasisPair::Hv, &mut rng)
                .unwrap();
        let f = t.classical_fidelity().unwrap();
        let sigma = (want * (1.0 - want) / 20_000f64).sqrt();
        assert!((f - want).abs() < 4.0 * sigma, "f = {f}, want {want}");
        assert!((want - 0.9724).abs() < 1e-12);
    }

    #[test]
    fn fidelity_decreases_with_noise() {
        let mut rng = derive_rng(43, &[]);
        let mut last = 1.1;
        for lambda in [0.0, 0.05, 0.1, 0.2] {
            let t = simulate_truth_table(
                &Operator::cnot(),
                lambda,
                100_000,
                BasisPair::Da,
                &mut rng,
            )
            .unwrap();
            let f = t.classical_fidelity().unwrap();
            assert!(f < last, "λ={lambda}: {f} !< {last}");
            last = f;
        }
    }
}
