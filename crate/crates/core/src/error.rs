use thiserror::Error;

use crate::graph::EdgeId;

/// Errors raised while building, parsing or validating instances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("edge id {0} out of range")]
    InvalidEdge(EdgeId),
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    InvalidVertex { vertex: usize, num_vertices: usize },
    #[error("edge {edge}: self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("non-finite value {value} in {field}")]
    NonFinite { field: String, value: f64 },
    #[error("graph must have at least one vertex and dimension >= 1")]
    EmptyGraph,

    #[error("target lists edge {0} more than once")]
    DuplicateTargetEdge(EdgeId),
    #[error("spanning tree: wrong edge count (expected {expected}, got {found})")]
    WrongEdgeCount { expected: usize, found: usize },
    #[error("spanning tree: target edges contain a cycle")]
    TreeHasCycle,
    #[error("spanning tree: target edges do not connect all vertices")]
    TreeNotConnected,
    #[error("st path: source {source_vertex} or dest {dest} invalid or equal")]
    BadEndpoints { source_vertex: usize, dest: usize },
    #[error("st path: target edges do not form a simple path from source to dest")]
    NotSimplePath,
    #[error("perfect matching: graph is not bipartite")]
    NotBipartite,
    #[error("perfect matching: vertex {0} is not covered exactly once")]
    NotPerfectMatching(usize),

    #[error("instance parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("instance field `{field}`: {message}")]
    Field { field: String, message: String },
}

/// Errors from the low-dimensional LP engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint {index} has {found} coefficients, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("LP dimension {0} exceeds the supported maximum of {max}", max = crate::lp::MAX_DIM)]
    TooManyVariables(usize),
    #[error("LP dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid bounds for variable {0}")]
    InvalidBounds(usize),
}

/// Errors from the subgraph optimization oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {edge} has negative weight {weight} at the query point")]
    NegativeWeight { edge: EdgeId, weight: f64 },
    #[error("dest {dest} is unreachable from source {source_vertex}")]
    Unreachable { source_vertex: usize, dest: usize },
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("no alternative subgraph exists")]
    NoAlternative,
}

/// Crate-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("ellipsoid method did not resolve within {iterations} iterations (best delta so far: {best_delta:?})")]
    Indeterminate {
        iterations: usize,
        best_point: Option<Vec<f64>>,
        best_delta: Option<f64>,
    },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
