use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance too large: {size} entries exceeds the enumeration limit of {limit}")]
    InstanceTooLarge { size: u128, limit: usize },

    #[error("malformed coordinate subset: {0}")]
    MalformedSubset(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("bad arity: {0}")]
    BadArity(String),

    #[error("weight undefined at position {0}")]
    WeightDomain(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tensor is not symmetric (entry {index:?} differs from its class representative)")]
    SymmetryViolation { index: Vec<usize> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{n} is not {m}-homogeneous (it has {omega} prime factors)")]
    NotHomogeneous { n: u64, m: usize, omega: usize },

    #[error("prime table too small: {0}")]
    PrimeTable(String),

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
