use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no inverse: zero has no multiplicative inverse")]
    NoInverse,
    #[error("field moduli differ ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("field size {0} is not a supported prime")]
    NotPrime(u64),
    #[error("singular system: evaluation points must be pairwise distinct")]
    SingularSystem,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("field too small: q = {q} but M + D = {alpha} distinct evaluation points are needed")]
    FieldTooSmall { q: u64, alpha: usize },
    #[error("invalid index sets: {0}")]
    InvalidSets(String),
    #[error("message count mismatch: expected {expected}, got {got}")]
    MessageCountMismatch { expected: usize, got: usize },
    #[error("undecodable block: {unknowns} unknowns but only {equations} equations")]
    Undecodable { unknowns: usize, equations: usize },
    #[error("query and answer disagree: {0}")]
    BlockMismatch(String),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error(
        "enumeration budget exceeded: {needed} items needed, budget is {budget}; use sample mode instead"
    )]
    BudgetExceeded { needed: String, budget: u64 },
    #[error(
        "query key is unreachable (zero probability under every demand/side-information pair)"
    )]
    UnreachableKey,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("relation is not good: {0}")]
    NotGood(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
