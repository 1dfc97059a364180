use thiserror::Error;

/// Errors produced by the simulation and compilation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("oracle disagrees with the tableau: {0}")]
    OracleMismatch(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("qudit index {index} out of range for {n} qudits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    RingMismatch(String),
    #[error("generators do not describe a pure stabilizer state: {0}")]
    InvalidTableau(String),
    #[error("forced outcome {outcome} on qudit {qudit} lies outside support {offset}+{stride}Z")]
    Contradiction {
        qudit: usize,
        outcome: u64,
        offset: u64,
        stride: u64,
    },
    #[error("qudit {0} is entangled with the rest of the register")]
    Entangled(usize),
    #[error("non-Clifford gate {label}: {reason}")]
    NonCliffordGate { label: String, reason: String },
    #[error("method two requires every input in logical |0>, mode {mode} starts in |{j}>")]
    MethodTwoInputViolation { mode: usize, j: u64 },
    #[error("gate not admitted by embedding plan: {0}")]
    NotAdmitted(String),
    #[error("Fock truncation insufficient: norm loss {0:e}")]
    Truncation(f64),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("state too large for dense simulation: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
