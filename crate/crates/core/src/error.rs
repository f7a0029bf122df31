use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed hierarchy: {0}")]
    Hierarchy(String),

    #[error("unknown criterion or node `{0}`")]
    UnknownNode(String),

    #[error("invalid scale for `{criterion}`: {reason}")]
    Scale { criterion: String, reason: String },

    #[error("invalid similarity-dissimilarity function for `{criterion}`: {reason}")]
    SimDis { criterion: String, reason: String },

    #[error("scale violation: action `{action}` on criterion `{criterion}`: {reason}")]
    ScaleViolation { action: String, criterion: String, reason: String },

    #[error("category `{0}` has an empty reference set")]
    EmptyReferenceSet(String),

    #[error("threshold out of range: likeness threshold {value} for `{category}` at `{node}` is outside [0.5, 1]")]
    ThresholdOutOfRange { category: String, node: String, value: f64 },

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("invalid parameter set for `{category}`: {reason}")]
    Parameters { category: String, reason: String },

    #[error("invalid card deck at `{node}`: {reason}")]
    Deck { node: String, reason: String },

    #[error("interaction error: {0}")]
    Interaction(String),

    #[error("net flow condition violated for `{criterion}` (margin {margin:.6})")]
    NetFlow { criterion: String, margin: f64 },

    #[error("invalid linear program: {0}")]
    InvalidLp(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("polytope error: {0}")]
    Polytope(String),

    #[error("sampler error: {0}")]
    Sampler(String),

    #[error("batch length mismatch: {0}")]
    BatchMismatch(String),

    #[error("incompatible preference information: {0}")]
    Infeasible(String),

    #[error("infeasible requirements: {0}")]
    InfeasibleRequirements(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
