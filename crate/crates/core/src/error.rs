use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements belong to different group models")]
    ModelMismatch,

    /// The answer lies outside the materialized finite region. Callers may
    /// enlarge the truncation and retry.
    #[error("truncation miss: {0}")]
    TruncationMiss(String),

    #[error("budget exceeded: {what} would exceed the limit of {limit}")]
    BudgetExceeded { what: String, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration at `{path}`: {message}")]
    InvalidConfig { path: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("vertices {0} and {1} are not connected in the truncated graph")]
    Disconnected(usize, usize),

    /// Acting on a stage-d cylinder produced a word shorter than d.
    #[error("stage underflow: `{word}` is shorter than stage {stage}")]
    StageUnderflow { word: String, stage: usize },

    #[error("parabolic classes {first} and {second} overlap at cylinder `{cylinder}`")]
    MalnormalityViolation {
        first: usize,
        second: usize,
        cylinder: String,
    },

    #[error("no corona model supplied for coset {0}")]
    MissingCoronaModel(usize),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    pub fn miss(msg: impl Into<String>) -> Self {
        Error::TruncationMiss(msg.into())
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_truncation_miss(&self) -> bool {
        matches!(self, Error::TruncationMiss(_))
    }
}
