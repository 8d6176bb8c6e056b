use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside of domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid knot vector: {0}")]
    KnotVector(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("kernel evaluated at coincident points (distance {distance:e})")]
    Singularity { distance: f64 },

    #[error("quadrature order {requested} exceeds the maximum of {max}")]
    QuadratureCapacity { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("elements belong to different meshes")]
    ForeignElement,

    #[error("iterative solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("iterative solver broke down after {iterations} iterations: {reason}")]
    Breakdown { iterations: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("evaluation set is empty: {0}")]
    EmptyEvaluationSet(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(value: f64, domain: &'static str) -> Self {
        Error::Domain { value, domain }
    }
}
