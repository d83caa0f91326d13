use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("orbit escaped the domain at step {step}: {point:?}")]
    DomainEscape { step: usize, point: Vec<f64> },

    #[error("unknown map `{0}` (see the map catalog in the CLI help)")]
    UnknownMap(String),

    #[error("parameter {name}={value} for map `{map}` outside valid range {range}")]
    ParamOutOfRange {
        map: String,
        name: String,
        value: f64,
        range: String,
    },

    #[error("partition axis {0} has zero cells")]
    EmptyAxis(usize),

    #[error("point {point:?} (orbit index {index}) lies outside the partition box")]
    OutOfBox { point: Vec<f64>, index: usize },

    #[error("empirical model inconsistent: {0}")]
    InconsistentModel(String),

    #[error("joint distribution marginals deviate from the stated marginals by {0:e}")]
    MarginalMismatch(f64),

    #[error("observation incompatible with this dynamics: {0}")]
    IncompatiblePartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("continued-fraction precision exhausted after {available} convergents")]
    PrecisionExhausted { available: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid quantum channel: {0}")]
    InvalidChannel(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("map `{0}` has no Jacobian")]
    NoJacobian(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
