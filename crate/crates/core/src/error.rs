use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which axis of a grid a frequency violation was found on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

/// First offending line of a grid that is not a frequency rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{axis} {index}: symbol {symbol} appears {found} times, expected {expected}")]
pub struct FrequencyViolation {
    pub axis: Axis,
    pub index: usize,
    pub symbol: u8,
    pub found: usize,
    pub expected: usize,
}

/// A column set of an array whose tuple counts are unbalanced.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("columns {columns:?}: tuple {tuple:?} appears {found} times, expected {expected}")]
pub struct OaViolation {
    pub columns: Vec<usize>,
    pub tuple: Vec<u8>,
    pub found: usize,
    pub expected: usize,
}

/// Text-format parse failure. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("line {line}, column {column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime field order")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("symbol {value} is out of range for {q} symbols")]
    SymbolOutOfRange { value: u64, q: u64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not a frequency rectangle: {0}")]
    Frequency(#[from] FrequencyViolation),
    #[error("not an orthogonal array: {0}")]
    OrthogonalArray(#[from] OaViolation),
    #[error("not a Hadamard matrix: rows {0} and {1} have inner product {2}")]
    NotHadamard(usize, usize, i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("input lacks a required property: {0}")]
    Precondition(String),
    #[error("construction output failed verification: {0}")]
    Unverified(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
