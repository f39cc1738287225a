use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid family spec `{spec}`: {reason}")]
    FamilySpec { spec: String, reason: String },

    #[error("unknown variable `{name}` (allowed: {allowed})")]
    UnknownVariable { name: String, allowed: String },

    #[error("profile is not positive at s = {at}")]
    NonPositiveProfile { at: f64 },

    #[error("derivatives unavailable: non-finite value at {at}")]
    DerivativesUnavailable { at: String },

    #[error("family is not a valid norm: {0}")]
    InvalidFamily(String),

    #[error("invalid dimension split ({n1},{n2}): need n1 >= n2 >= 2")]
    InvalidSplit { n1: usize, n2: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector")]
    ZeroVector,

    #[error("boundary direction: y lies in V1 or V2")]
    BoundaryDirection,

    #[error("step {step} too large (limit {limit})")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("no clear singular-value gap at tolerance {tol} (nearest value {nearest})")]
    IllConditioned { tol: f64, nearest: f64 },

    #[error("input basis is linearly dependent")]
    DependentBasis,

    #[error("invalid rank {rank} for type {kind}")]
    InvalidRank { kind: String, rank: usize },

    #[error("invalid root system spec `{0}`")]
    RootTypeSpec(String),

    #[error("invalid algebra spec `{0}`")]
    AlgebraSpec(String),

    #[error("inputs do not commute")]
    NonCommuting,

    #[error("input is not in the diagonal Cartan subalgebra")]
    NotDiagonal,

    #[error("subalgebra check failed: {0}")]
    Subalgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
