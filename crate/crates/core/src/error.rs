use thiserror::Error;

/// Errors raised by generators, solvers and checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible edge count: requested {requested}, only {available} distinct edges exist")]
    InfeasibleCount { requested: u64, available: u64 },

    #[error("integrality violation: {0}")]
    Integrality(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("alphabet violation: value {value} at node {node} is not below q = {q}")]
    AlphabetViolation { node: usize, value: u8, q: usize },

    #[error("size cap exceeded: {what} (limit {limit}, requested {requested})")]
    SizeCap { what: &'static str, limit: usize, requested: usize },

    #[error("premise violation: {0}")]
    PremiseViolation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
