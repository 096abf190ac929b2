//! Error type shared by every module.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("qubit index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{gate}` expects {expected} qubit(s), got {got}")]
    Arity { gate: String, expected: usize, got: usize },

    #[error("repeated qubit {0} in gate application")]
    RepeatedQubit(usize),

    #[error("cyclic gate definition involving `{0}`")]
    CyclicDefinition(String),

    #[error("uninhabited type: terms {a} and {b} anticommute")]
    Uninhabited { a: String, b: String },

    #[error("contradictory type: the product of terms {witness:?} is -I")]
    Contradictory { witness: Vec<usize> },

    #[error("redundant type: the product of terms {witness:?} is the identity")]
    Redundant { witness: Vec<usize> },

    #[error("term `{0}` is not a signed Pauli string")]
    NotPauli(String),

    #[error("invalid additive type `{0}`: not both unitary and Hermitian")]
    InvalidAdditive(String),

    #[error("coefficient {0} lies outside the ring (a + b*rt2)/2^k")]
    OutsideRing(String),

    #[error("summand cap {cap} exceeded at statement {position} (`{gate}`)")]
    SummandCap { cap: usize, position: usize, gate: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("oracle size cap exceeded: {qubits} qubits > {cap}")]
    OracleCap { qubits: usize, cap: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that signal an analysis outside the supported fragment
    /// rather than bad input.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported(_) | Error::SummandCap { .. } | Error::OracleCap { .. })
    }
}
