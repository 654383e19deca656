use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EspError {
    #[error("infinite eccentricity: graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("invalid edge {0}-{1}: {2}")]
    InvalidEdge(Vertex, Vertex, &'static str),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("oracle budget of {0} memo entries exceeded")]
    OracleBudget(u64),
    #[error("enumeration budget exceeded: {needed} items requested, budget {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("graph too large for the bit-set oracle: n = {0} > 128")]
    TooLarge(usize),
    #[error("more than {0} shortest paths")]
    PathCap(usize),
    #[error("invalid deletion set: {0}")]
    InvalidDeletionSet(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("colorful path-cover instance: {0}")]
    CpcInvariant(String),
    #[error("graph is not split")]
    NotSplit,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, EspError>;
