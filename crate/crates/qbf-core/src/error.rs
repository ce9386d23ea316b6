//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A polynomial operation would exceed the degree cap.
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    /// Multiplicative inverse of the zero element requested.
    #[error("the zero element has no multiplicative inverse")]
    ZeroInverse,

    /// Evaluation hit a pole of a rational function.
    #[error("evaluation pole at p = {0}")]
    Pole(f64),

    /// A state would exceed the qubit cap.
    #[error("qubit count {qubits} exceeds cap {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Post-selection on a branch of zero squared norm.
    #[error("post-selection on zero-probability branch (qubit {qubit}, outcome {outcome})")]
    ZeroBranch { qubit: usize, outcome: u8 },

    #[error("basis subset is empty")]
    EmptyBasis,

    #[error("zero conditional probability mass over the basis subset")]
    ZeroMass,

    /// Input outside the operation's meaningful domain (0·∞, 1/0, ∞+∞, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("synthesis error: {0}")]
    Synthesis(String),

    /// A retried post-selection loop ran out of attempts.
    #[error("attempt cap {0} exceeded")]
    AttemptCap(u64),

    /// Coin denominator vanishes at this p and the function was not extended.
    #[error("coin denominator vanishes at p = {0}; apply the common-zero extension first")]
    Singularity(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error: {0}")]
    Data(String),
}
