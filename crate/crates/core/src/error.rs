use crate::model::Violation;
use crate::value::{format_value, Value};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, found {found}")]
    Length {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("{what} is negative")]
    NegativeValue { what: String },
    #[error("good index {good} out of range for m = {m}")]
    GoodOutOfRange { good: usize, m: usize },
    #[error("an instance needs at least one agent")]
    NoAgents,
    #[error("{what} requires additive valuations")]
    NotAdditive { what: String },
    #[error("{what} requires a single (homogeneous) market valuation")]
    NeedsHomogeneousMarket { what: String },
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error("agents' utilities do not induce a common ranking (agents {a} and {b} disagree on g{} vs g{})", .goods.0 + 1, .goods.1 + 1)]
    NotIdenticalRankings {
        a: usize,
        b: usize,
        goods: (usize, usize),
    },
    #[error("{what}: search space of {size} exceeds the enumeration bound {bound}")]
    BoundExceeded {
        what: String,
        size: String,
        bound: u64,
    },
    #[error("alpha = {} is outside [0, 1]", format_value(.0))]
    InvalidAlpha(Value),
    #[error("price of g{} is not strictly positive", .good + 1)]
    NonPositivePrice { good: usize },
    #[error("agent {} has zero utility for g{}; fPO + EQ1 needs nonzero subjective utilities", .agent + 1, .good + 1)]
    ZeroUtility { agent: usize, good: usize },
    #[error("iteration guard of {limit} steps exceeded")]
    IterationGuard { limit: u64 },
    #[error("valuation of agent {} is not monotone: {detail}", .agent + 1)]
    NonMonotone { agent: usize, detail: String },
    #[error("no pair-respecting EF1 orientation found among {searched} candidates")]
    NoOrientation { searched: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid allocation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAllocation(Vec<Violation>),
    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },
    #[error("malformed cake input: {0}")]
    Cake(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_bound_exceeded(&self) -> bool {
        matches!(self, Error::BoundExceeded { .. })
    }
}
