use thiserror::Error;

use crate::simplex::ExponentVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("exponent vectors have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("exponent vectors have different degrees ({0} vs {1})")]
    DegreeMismatch(u64, u64),

    #[error("subsets have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("point {point:?} does not have degree {degree}")]
    PointNotInSimplex { point: ExponentVector, degree: u32 },

    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("sample for point {0} is the zero vector")]
    ZeroSample(usize),

    #[error("{size} points exceed the {capacity} conditions of a single point of multiplicity {m}")]
    UnderDetermined { size: usize, capacity: usize, m: u32 },

    #[error("{k} slices exceed multiplicity {m}")]
    TooManySlices { k: usize, m: u32 },

    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,

    #[error("operation requires n = 2, got n = {0}")]
    RequiresPlane(usize),

    #[error("expected {expected} orderings, got {got}")]
    OrderingCount { expected: usize, got: usize },

    #[error("cannot parse monomial ordering {0:?}")]
    ParseOrdering(String),

    #[error("ordering acts on {ordering} variables but points have {points}")]
    OrderingArity { ordering: usize, points: usize },

    #[error("invalid strict-partition parameters: {0}")]
    InvalidStrictParams(String),

    #[error("lattice point lies on cutting hyperplane: sum {sum} = {c} * mu")]
    LatticePointOnCut { c: u32, sum: u32 },

    #[error("malformed partition plan: {0}")]
    MalformedPlan(String),

    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),

    #[error("cache i/o error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
