//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(u32, usize),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("duplicate symbol {0:?} in information set")]
    DuplicateSymbol(String),
    #[error("degree bound {bound} violated at vertex {vertex} (degree {degree})")]
    DegreeBound { vertex: u32, degree: usize, bound: usize },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("not a partition of the vertex set")]
    NotAPartition,
    #[error("graph is not a disjoint union of cycles")]
    NotCycles,
    #[error("cycle of length {0} below required minimum {1}")]
    CycleTooShort(usize, usize),
    #[error("path has no vertices")]
    EmptyPath,
    #[error("simple-graph constraint violated: {0}")]
    NotSimple(String),
    #[error("epsilon must satisfy 0 < eps < 1 (got {0})")]
    BadEpsilon(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("disc mapping {mapping} undefined on an occurring disc: {reason}")]
    MappingUndefined { mapping: String, reason: String },
    #[error("cluster structure not decodable: {0}")]
    NotDecodable(String),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("projection enumeration cap {0} exceeded without completion")]
    CapExceeded(usize),
    #[error("iteration budget {0} exhausted")]
    BudgetExhausted(u64),
    #[error("wall-clock budget of {0} ms exhausted")]
    WallClock(u64),
    #[error("approximation pipeline missed its distance target: {0}")]
    PipelineDefect(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
