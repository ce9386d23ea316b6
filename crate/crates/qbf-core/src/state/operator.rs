//! Gate and projector-block matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitude scale of one pass through the reconfigurable two-qubit photonic
/// block (M₀⊗A + M₁⊗B): the spatial-encoding step succeeds with probability
/// 1/2 and the beam-splitter recombination with 1/4, so the block carries an
/// overall amplitude factor 1/(2√2) and a probability factor 1/8.
pub const PHOTONIC_AMP: f64 = 0.35355339059327373; // 1/(2*sqrt(2))

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const R1: Complex64 = Complex64::new(1.0, 0.0);
const Z0: Complex64 = Complex64::new(0.0, 0.0);

/// A k-qubit operator as a dense 2ᵏ×2ᵏ matrix (row-major). `unitary` is
/// verified on construction; projector composites such as M₀·X or M_d carry
/// `unitary = false` and leave states unnormalized pending post-selection.
#[derive(Clone, Debug)]
pub struct Operator {
    qubits: usize,
    matrix: Vec<Complex64>,
    unitary: bool,
    name: String,
}

impl Operator {
    pub fn from_matrix(name: &str, qubits: usize, matrix: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << qubits;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "operator {name}: expected {}x{} matrix, got {} entries",
                dim,
                dim,
                matrix.len()
            )));
        }
        let unitary = matrix_is_unitary(&matrix, dim, 1e-9);
        Ok(Operator {
            qubits,
            matrix,
            unitary,
            name: name.to_string(),
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn scaled(&self, factor: f64, name: &str) -> Self {
        let f = c(factor, 0.0);
        Operator {
            qubits: self.qubits,
            matrix: self.matrix.iter().map(|m| m * f).collect(),
            unitary: false,
            name: name.to_string(),
        }
    }

    pub fn identity(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut m = vec![Z0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = R1;
        }
        Operator {
            qubits,
            matrix: m,
            unitary: true,
            name: "i".to_string(),
        }
    }

    pub fn pauli_x() -> Self {
        Operator::from_matrix("x", 1, vec![Z0, R1, R1, Z0]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Operator::from_matrix("z", 1, vec![R1, Z0, Z0, c(-1.0, 0.0)]).unwrap()
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Operator::from_matrix("h", 1, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).unwrap()
    }

    /// The single-qubit unitary of the type-1 factory:
    /// [[√a, √(1−a)], [√(1−a), −√a]].
    pub fn u_a(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain(format!("u_a parameter {a} outside [0,1]")));
        }
        let (sa, sb) = (a.sqrt(), (1.0 - a).sqrt());
        Operator::from_matrix(
            "u_a",
            1,
            vec![c(sa, 0.0), c(sb, 0.0), c(sb, 0.0), c(-sa, 0.0)],
        )
    }

    /// Projector onto |0⟩.
    pub fn proj0() -> Self {
        Operator::from_matrix("m0", 1, vec![R1, Z0, Z0, Z0]).unwrap()
    }

    /// Projector onto |1⟩.
    pub fn proj1() -> Self {
        Operator::from_matrix("m1", 1, vec![Z0, Z0, Z0, R1]).unwrap()
    }

    /// M₀·X = |0⟩⟨1|.
    pub fn m0x() -> Self {
        Operator::from_matrix("m0x", 1, vec![Z0, R1, Z0, Z0]).unwrap()
    }

    /// Projector onto |+⟩.
    pub fn md() -> Self {
        let h = 0.5;
        Operator::from_matrix("md", 1, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    pub fn cnot() -> Self {
        block_sum(&Operator::identity(1), &Operator::pauli_x(), "cnot")
    }

    /// C-M₀X = M₀⊗I + M₁⊗(M₀·X), the controlled projector block used by the
    /// simplified add circuit.
    pub fn c_m0x() -> Self {
        block_sum(&Operator::identity(1), &Operator::m0x(), "c_m0x")
    }

    /// M₀⊗A + M₁⊗B realized by the photonic logic, including its intrinsic
    /// 1/8 acceptance probability.
    pub fn photonic_block(a: &Operator, b: &Operator, name: &str) -> Result<Self> {
        if a.qubits != 1 || b.qubits != 1 {
            return Err(Error::DimensionMismatch(
                "photonic block parts must be single-qubit".into(),
            ));
        }
        Ok(block_sum(a, b, name).scaled(PHOTONIC_AMP, name))
    }

    /// Photonic CNOT (A = I, B = X) with its 1/8 acceptance factor.
    pub fn photonic_cnot() -> Self {
        Operator::photonic_block(&Operator::identity(1), &Operator::pauli_x(), "photonic_cnot")
            .unwrap()
    }

    /// Photonic add block (A = I, B = M₀X) with its 1/8 acceptance factor.
    pub fn photonic_add() -> Self {
        Operator::photonic_block(&Operator::identity(1), &Operator::m0x(), "photonic_add").unwrap()
    }

    /// The p-state preparation block: (H·M₀)⊗(H·M₀) + (M₁·M_d·M₁)⊗X, with
    /// the photonic acceptance factor. The M₁·M_d·M₁ composite halves the
    /// |1⟩ amplitude.
    pub fn photonic_p_prep() -> Self {
        let hm0 = compose2(&Operator::hadamard(), &Operator::proj0());
        let half1 = compose2(&compose2(&Operator::proj1(), &Operator::md()), &Operator::proj1());
        let branch_a = kron2(&hm0, &hm0);
        let branch_b = kron2(&half1, &Operator::pauli_x());
        let sum: Vec<Complex64> = branch_a
            .iter()
            .zip(&branch_b)
            .map(|(x, y)| x + y)
            .collect();
        Operator::from_matrix("photonic_p_prep", 2, sum)
            .unwrap()
            .scaled(PHOTONIC_AMP, "photonic_p_prep")
    }
}

/// M₀⊗A + M₁⊗B on two qubits (control = first qubit).
fn block_sum(a: &Operator, b: &Operator, name: &str) -> Operator {
    let mut m = vec![Z0; 16];
    for i in 0..2 {
        for j in 0..2 {
            m[i * 4 + j] = a.entry(i, j);
            m[(2 + i) * 4 + (2 + j)] = b.entry(i, j);
        }
    }
    Operator::from_matrix(name, 2, m).unwrap()
}

/// Matrix product x·y of two single-qubit operators.
fn compose2(x: &Operator, y: &Operator) -> Operator {
    let mut m = vec![Z0; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                m[i * 2 + j] += x.entry(i, k) * y.entry(k, j);
            }
        }
    }
    Operator::from_matrix(&format!("{}.{}", x.name, y.name), 1, m).unwrap()
}

/// Kronecker product of two single-qubit operators (4×4 flat).
fn kron2(x: &Operator, y: &Operator) -> Vec<Complex64> {
    let mut m = vec![Z0; 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(i * 2 + k) * 4 + (j * 2 + l)] = x.entry(i, j) * y.entry(k, l);
                }
            }
        }
    }
    m
}

fn matrix_is_unitary(m: &[Complex64], dim: usize, tol: f64) -> bool {
    for i in 0..dim {
        for j in 0..dim {
            // (M†M)_{ij} = Σ_k conj(M_{ki}) M_{kj}
            let mut acc = Z0;
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            let want = if i == j { R1 } else { Z0 };
            if (acc - want).norm() > tol {
                return false;
            }
        }
    }
    true
}
