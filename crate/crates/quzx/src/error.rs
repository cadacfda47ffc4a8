use thiserror::Error;

/// Errors raised while building, evaluating or synthesizing diagrams.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("illegal arity for {kind}: {n_in} inputs, {n_out} outputs")]
    Arity {
        kind: &'static str,
        n_in: usize,
        n_out: usize,
    },
    #[error("phase vector has length {got}, expected {expected}")]
    PhaseLength { expected: usize, got: usize },
    #[error("dimension {0} is too small, generators need d >= 2")]
    Dimension(usize),
    #[error("X spider label {label} out of range for d = {d}")]
    Label { label: usize, d: usize },
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("contraction cap exceeded at step {step}: {size} entries > cap {cap}")]
    CapExceeded { step: usize, size: u128, cap: u128 },
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("bad parameter `{name}`: {reason}")]
    Param { name: String, reason: String },
    #[error("stale rewrite site: {0}")]
    StaleSite(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
