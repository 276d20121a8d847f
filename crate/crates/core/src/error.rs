use std::io;

use thiserror::Error;

/// Errors raised by graph construction, simulation, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("vertex id {id} out of range for graph with {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("round {round}: source {vertex} is already burned")]
    AlreadyBurned { round: usize, vertex: usize },
    #[error("brute force limited to {cap} vertices, graph has {n}")]
    CapExceeded { cap: usize, n: usize },
    #[error("burning number unavailable: {0}")]
    ReferenceUnavailable(String),
    #[error("all {0} trials stalled")]
    AllStalled(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
