use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set mismatch: expected {expected} elements, got {actual}")]
    GroundMismatch { expected: usize, actual: usize },
    #[error("invalid ground set: {0}")]
    InvalidGround(String),
    #[error("generator family is empty")]
    EmptyFamily,
    #[error("generators do not cover the ground set (element {element} is uncovered)")]
    Uncovered { element: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{what} limit exceeded: {value} > {limit}")]
    Cap {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("target set is trivial (empty or the whole ground set)")]
    TrivialTarget,
    #[error("source does not evaluate to the target set")]
    WrongValue,
    #[error("pair family does not certify the target: {0}")]
    InvalidLambda(String),
    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),
    #[error("result carries no witness")]
    NoWitness,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
