//! Crate-wide error type.

/// Errors surfaced by spec validation, solvers and simulators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("reducible chain, closed classes at states {0}")]
    Reducible(String),
    #[error("no absorption possible: {0}")]
    NoAbsorption(String),
    #[error("frozen configuration: total exit rate is zero")]
    Frozen,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
