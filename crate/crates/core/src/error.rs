use thiserror::Error;

use crate::groups::GroupElement;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus at index {index} is negative ({value})")]
    NegativeModulus { index: usize, value: i64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operation requires a finite group")]
    InfiniteGroup,

    #[error("integer overflow in group arithmetic")]
    Overflow,

    #[error("values from different coefficient groups were combined")]
    MixedTargets,

    #[error("arguments live over different groups or coefficient groups")]
    GroupMismatch,

    #[error("invalid coefficient group: {0}")]
    InvalidTarget(String),

    #[error("value {value} violates the torsion constraint for generator(s) {}", format_generators(*.k, *.l))]
    TorsionViolation { k: usize, l: Option<usize>, value: String },

    #[error("search space of size {size} exceeds the configured ceiling {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("bilinear witness fails S(x,x) = q(x) at x = {x}")]
    WitnessMismatch { x: GroupElement },

    #[error("presentation is not pre-admissible: {axiom} fails ({detail})")]
    NotPreAdmissible { axiom: String, detail: String },

    #[error("coefficient group is not divisible")]
    TargetNotDivisible,

    #[error("coefficient group must be Q/Z")]
    TargetNotQmodZ,

    #[error("presentation is not admissible: {0}")]
    PresentationNotAdmissible(String),

    #[error("presentation is not optimal: {0}")]
    PresentationNotOptimal(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("k-map is not normalized at ({x}, {y})")]
    NotNormalized { x: GroupElement, y: GroupElement },

    #[error("trace of the cocycle is not a quadratic form: {0}")]
    TraceNotQuadratic(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_generators(k: usize, l: Option<usize>) -> String {
    match l {
        Some(l) => format!("({k},{l})"),
        None => format!("({k})"),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
