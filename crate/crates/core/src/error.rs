use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand mismatch: {0} vs {1}")]
    RadicandMismatch(String, String),
    #[error("unknown copy id `{0}`")]
    UnknownCopy(String),
    #[error("copy id `{0}` already present")]
    DuplicateCopy(String),
    #[error("cut list must be nondecreasing")]
    DecreasingCuts,
    #[error("invalid cut index {0} (order has {1} copies)")]
    InvalidCut(usize, usize),
    #[error("scalar field mismatch")]
    FieldMismatch,
    #[error("operation undefined on infinity")]
    InfiniteOperand,
    #[error("element has support outside the omega part")]
    NotOmegaSupported,
    #[error("element lies in the span of the submodel")]
    InSpan,
    #[error("element does not lie in the span of the submodel")]
    NotInSpan,
    #[error("element is not admissible here: {0}")]
    BadElement(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("embedding constraint violated: {0}")]
    EmbeddingConstraint(String),
    #[error("pseudolimit data malformed: {0}")]
    BadPseudolimit(String),
    #[error("stabilization bound exceeded while resolving a pseudolimit query")]
    Unstabilized,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(at: usize, msg: impl Into<String>) -> Error {
        Error::Parse { at, msg: msg.into() }
    }
}
