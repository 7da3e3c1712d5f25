use thiserror::Error;

use crate::subset::IndexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty ground set")]
    EmptyGroundSet,
    #[error("empty index set where a non-empty one is required")]
    EmptySet,
    #[error("ground set of size {size} exceeds the limit of {limit} indices")]
    TooManyIndices { size: usize, limit: usize },
    #[error("index {index} is outside the ground set of size {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{inner:?} is not a subset of {outer:?}")]
    NotSubset { inner: IndexSet, outer: IndexSet },
    #[error("index sets {a:?} and {b:?} overlap")]
    Overlap { a: IndexSet, b: IndexSet },
    #[error("lattice table is missing the entry for {0:?}")]
    MissingEntry(IndexSet),
    #[error("lattice table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("expected a {expected} table, found a {found} table")]
    TableKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("lattice tables live on different ground sets ({0} vs {1} indices)")]
    DimensionMismatch(usize, usize),
    #[error("non-finite value {value} at {set:?}")]
    NonFinite { set: IndexSet, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("atom {atom} has an all-zero direction")]
    ZeroDirection { atom: usize },
    #[error("atom {atom} has nonpositive weight {weight}")]
    NonPositiveWeight { atom: usize, weight: f64 },
    #[error("atom {atom} has an invalid direction coordinate {value}")]
    InvalidDirection { atom: usize, value: f64 },
    #[error("degenerate margin: coordinate {coordinate} has no positive coefficient")]
    DegenerateMargin { coordinate: usize },
    #[error("moment condition violated: coordinate {coordinate} integrates to {sum}")]
    MomentCondition { coordinate: usize, sum: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-smooth model: {0}")]
    NonSmooth(String),
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
    #[error("probe outside sample range: {0}")]
    ProbeOutsideSampleRange(String),
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("sampler validation failed: {0}")]
    SamplerValidation(String),
    #[error("model spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
