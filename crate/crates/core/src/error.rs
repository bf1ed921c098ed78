use thiserror::Error;

use crate::circuit::ParseError;
use crate::shor::FactoringTrace;

pub type Result<T, E = QsimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: usize },

    #[error("state norm deviates from 1 by {deviation:e}")]
    Normalization { deviation: f64 },

    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("qubit {qubit} listed more than once")]
    DuplicateQubit { qubit: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("measured value carries no period information")]
    NoInformation,

    #[error("base {a} shares the factor {gcd} with the modulus")]
    SharedFactor { a: u64, gcd: u64 },

    #[error("syndrome {syndrome:#b} has no correction")]
    Uncorrectable { syndrome: usize },

    #[error("no factor found after {} attempts", .trace.attempts.len())]
    FactoringFailed { trace: Box<FactoringTrace> },
}

impl QsimError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QsimError::Domain(msg.into())
    }
}
