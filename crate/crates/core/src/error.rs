use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },

    #[error("level {0} is not supported (0 <= r <= {max})", max = crate::algebra::MAX_LEVEL)]
    UnsupportedLevel(u32),

    #[error("expected {expected} coefficients for level {level}, got {got}")]
    CoefficientCount { level: u32, expected: usize, got: usize },

    #[error("division by zero")]
    ZeroDivision,

    #[error("conjugation formula requires level r >= 2, got r = {0}")]
    ConjFormulaDomain(u32),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("inverse of zero at phrase node {path}")]
    PhraseDomain { path: String },

    #[error("phrase parse error at byte {pos}: {msg}")]
    PhraseParse { pos: usize, msg: String },

    #[error("point is outside the chart domain: {0}")]
    OutsideDomain(String),

    #[error("chart overlap is empty: {0}")]
    EmptyOverlap(String),

    #[error("coverage defect: point {point:?} is deep in no chart")]
    Coverage { point: Vec<f64> },

    #[error("manifold config: {0}")]
    Config(String),

    #[error("unknown built-in manifold '{0}'")]
    UnknownBuiltin(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
