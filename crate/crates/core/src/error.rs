use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid hyperplane: {0}")]
    InvalidHyperplane(String),
    #[error("hyperplane {0:?} is not a member of the arrangement")]
    NotMember(Vec<i64>),
    #[error("subspace is not a flat of the arrangement")]
    NotAFlat,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate hyperplane {0:?}")]
    DuplicateHyperplane(Vec<i64>),
    #[error("subset-expansion oracle refused {size} hyperplanes (bound {bound})")]
    OracleTooLarge { size: usize, bound: usize },
    #[error("invalid exponent shapes: {0}")]
    InvalidShapes(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("exact linear algebra failed: {0}")]
    LinearAlgebra(String),
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
