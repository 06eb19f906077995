use thiserror::Error;

use crate::context::Concept;

/// Errors raised by plaintext context operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("{side} index {index} out of range (size {size})")]
    InvalidIndex {
        side: &'static str,
        index: usize,
        size: usize,
    },
    #[error("context dimensions must be at least 2x2, got {m}x{n}")]
    InvalidDimensions { m: usize, n: usize },
    #[error("incidence row {row} has length {got}, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("incidence entries must be 0 or 1, found {value} at ({row}, {col})")]
    InvalidBit { row: usize, col: usize, value: u8 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("label count {got} does not match dimension {expected}")]
    LabelMismatch { got: usize, expected: usize },
    #[error("enumerated side has {side} elements, above the limit of {limit}")]
    TooLarge { side: usize, limit: usize },
}

/// Errors raised by the homomorphic backends.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeError {
    #[error("plaintext {msg} outside [0, {modulus})")]
    PlaintextOutOfRange { msg: u64, modulus: u64 },
    #[error("operands come from different parameter sets")]
    ParamsMismatch,
    #[error("noise bound exceeded; parameters are too small for this circuit")]
    NoiseOverflow,
    #[error("secret modulus would need {required} bits, above the {ceiling}-bit ceiling")]
    ParamsInfeasible { required: u64, ceiling: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Errors raised by the encrypted pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    He(#[from] HeError),
    #[error("cipher vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("operation requires at least one element")]
    EmptyInput,
    #[error("recovered cardinality {actual} does not match reported {reported}")]
    IntegrityError { reported: u64, actual: u64 },
    #[error("worker count must be at least 1")]
    InvalidWorkerCount,
    #[error(
        "concept sets differ: {} missing, {} unexpected",
        missing.len(),
        unexpected.len()
    )]
    VerificationFailure {
        missing: Vec<Concept>,
        unexpected: Vec<Concept>,
    },
    #[error("{count} raw matrix cells were decrypted during the pipeline")]
    TranscriptViolation { count: usize },
}
