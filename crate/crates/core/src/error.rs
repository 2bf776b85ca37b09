use thiserror::Error;

use crate::povm::ValidationReport;

/// Errors raised by the library. Validation *verdicts* are reported through
/// [`ValidationReport`]; this type covers structural problems and refused
/// computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty effect list")]
    NoEffects,

    #[error("invalid POVM: {0}")]
    InvalidPovm(ValidationReport),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("outcome index {index} out of range for {outcomes} outcomes")]
    OutcomeOutOfRange { index: usize, outcomes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),

    #[error("phase-space grid too small: {0}")]
    GridTooSmall(String),

    #[error("POVM is extremal; no convex decomposition exists")]
    ExtremalInput,

    #[error("degenerate witness: {0}")]
    DegenerateWitness(String),

    #[error("covariant seed not normalized: {0}")]
    SeedNormalization(String),

    #[error("discretization failed: {0}")]
    Discretization(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
