use thiserror::Error;

/// Errors produced by graph construction, the solvers and instance I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("rotation system is not planar: V - E + F = {vertices} - {edges} + {faces} = {euler}, expected 2")]
    EulerViolation { vertices: usize, edges: usize, faces: usize, euler: i64 },

    #[error("matching problem has an odd number of vertices ({0})")]
    OddVertexCount(usize),

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    Validation(Box<Error>),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("internal solver error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
