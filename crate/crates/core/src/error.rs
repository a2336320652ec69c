use std::fmt;

use thiserror::Error;

/// Location-tagged failure from one of the text parsers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Error inside a single-line string; `column` is 1-based.
    pub fn at(column: usize, message: impl Into<String>) -> Self {
        ParseError::new(1, column, message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{inner} is not contained in {outer}")]
    NotContained { inner: String, outer: String },
    #[error("quaders {0} and {1} overlap")]
    NotDisjoint(String, String),
    #[error("unbounded interval {0} where a bounded one is required")]
    Unbounded(String),
    #[error("degenerate domain {0}")]
    Degenerate(String),
    #[error("empty domain")]
    EmptyDomain,
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(String, String),
    #[error("point {point} lies outside the ambient interval {ambient}")]
    OutsideAmbient { point: String, ambient: String },
    #[error("operation requires real-valued step functions")]
    ComplexValue,
    #[error("value map: {0}")]
    ValueMap(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("exponent contract violated: {0}")]
    Exponent(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("input {index} is linearly dependent on its predecessors (relative residual {ratio:e})")]
    LinearDependence { index: usize, ratio: f64 },
    #[error("family is not orthogonal: |<x{i}, x{j}>| = {value:e}")]
    NotOrthogonal { i: usize, j: usize, value: f64 },
    #[error("contraction violated at step {step}: observed ratio {ratio} exceeds {factor}")]
    ContractionViolation { step: usize, ratio: f64, factor: f64 },
    #[error("no convergence within {0} iterations")]
    MaxIterations(usize),
    #[error("operator norm {0} is not below 1")]
    NormNotBelowOne(f64),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("grid of {0} cells exceeds the enumeration limit")]
    TooManyCells(u128),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
