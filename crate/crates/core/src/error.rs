//! Error types shared across the crate.

use thiserror::Error;

/// A problem with an edge-list file, tagged with the 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing header `n m`")]
    MissingHeader,
    #[error("malformed line `{0}`")]
    Malformed(String),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    Duplicate(usize, usize),
    #[error("vertex id {id} is not below n = {n}")]
    IdOutOfRange { id: usize, n: usize },
    #[error("header announced {expected} edges but {found} were listed")]
    EdgeCount { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid generator parameters: {0}")]
    InvalidModel(String),
    #[error("edge list is not a simple graph: {0}")]
    NotSimple(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LcaError {
    #[error("{{{0}, {1}}} is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("degree {deg} is not above the class threshold {delta}")]
    BelowClassedRange { deg: usize, delta: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("vertex {0} is not medium")]
    NotMedium(usize),
    #[error("vertex {w} is not a member of the light cluster of {s}")]
    NotInCluster { s: usize, w: usize },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Lca(#[from] LcaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid sweep: {0}")]
    Spec(String),
}
