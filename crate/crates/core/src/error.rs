use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point at signed distance {distance} lies outside the tubular neighbourhood of width {width}")]
    PointOutsideTube { distance: f64, width: f64 },

    #[error("lifted point left the tubular neighbourhood in cell {cell} (signed distance {distance})")]
    ProjectionOutsideTube { cell: usize, distance: f64 },

    #[error("unsupported degree {degree} (dimension {dim}): {reason}")]
    UnsupportedDegree { dim: usize, degree: usize, reason: &'static str },

    #[error("unsupported Gmsh element type {0}")]
    UnsupportedElementType(u32),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inverted element {cell}: jacobian determinant {det:e}")]
    InvertedElement { cell: usize, det: f64 },

    #[error("degenerate boundary facet (cell {cell}, face {face})")]
    DegenerateFacet { cell: usize, face: usize },

    #[error("matrix argument is not symmetric (asymmetry {0:e})")]
    NonSymmetricInput(f64),

    #[error("mesh assertion failed: {0}")]
    Assertion(String),

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("conjugate gradient breakdown: operator is not positive definite ({0})")]
    BreakdownNonSpd(String),

    #[error("system of size {size} exceeds the dense solver limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("sparse factorisation failed: {0}")]
    Factorization(String),

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("convergence table needs at least two reports with strictly decreasing h: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
