use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("total dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIM)]
    TooLarge(usize),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid beable: {0}")]
    InvalidBeable(String),

    #[error("conditioning event has probability {0:e}, treated as impossible")]
    ImpossibleCondition(f64),

    #[error("no branch carries weight above the branch threshold")]
    DegenerateBranches,

    #[error("branch list is empty")]
    EmptyBranches,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("subensemble {0} is empty")]
    EmptySubensemble(usize),

    #[error("invalid split: {0}")]
    Split(String),

    #[error("spec error at `{path}`: {reason}")]
    Spec { path: String, reason: String },

    #[error("step {index} failed: {reason}")]
    Step { index: usize, reason: String },
}

impl Error {
    pub(crate) fn spec(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Spec { path: path.into(), reason: reason.into() }
    }
}
