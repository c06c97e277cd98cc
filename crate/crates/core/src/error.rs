use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} bits, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("resource cap exceeded: {what} is {got}, limit {limit}")]
    ResourceCap { what: &'static str, limit: u64, got: u64 },
    #[error("state {state:#x} leaves the state space")]
    Closure { state: u64 },
    #[error("distributions live on different state spaces ({left} vs {right} states)")]
    SpaceMismatch { left: usize, right: usize },
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("mixing time not reached within {cap} steps (last d = {last_d})")]
    Unresolved { cap: u64, last_d: f64 },
    #[error("chain carries no edge weights")]
    MissingWeights,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("entry ({row}, {col}) = {value} is not dyadic; circuits only express probabilities k/2^m")]
    NotDyadic { row: usize, col: usize, value: String },
}
