use thiserror::Error;

/// Validation failures. Audit outcomes (contradictions, non-isometries) are
/// reported as data and never surface here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space must contain at least one subsystem")]
    EmptySpace,

    #[error("subsystem `{0}` has no outcome symbols")]
    EmptySubsystem(String),

    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },

    #[error("space dimension {0} exceeds the supported maximum of {max}", max = crate::qcore::MAX_DIMENSION)]
    DimensionTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("unknown outcome symbol `{symbol}` for subsystem {subsystem}")]
    UnknownSymbol { subsystem: usize, symbol: String },

    #[error("subsystem index {index} out of range for a space with {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("degenerate bipartition: {0}")]
    DegenerateCut(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
