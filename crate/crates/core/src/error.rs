use std::path::PathBuf;

/// Errors produced by the refinement, measurement and file-format layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("combination budget exceeded: {size} combinations > budget {budget}")]
    BudgetExceeded { size: u128, budget: usize },

    #[error("refinement failed: {0}")]
    RefinementFailed(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("malformed landmark table at line {line}: {msg}")]
    MalformedRow { line: u64, msg: String },

    #[error("duplicate landmark row: image_id={image_id} landmark_index={index}")]
    DuplicateKey { image_id: String, index: usize },

    #[error("bad heatmap header: {0}")]
    BadHeader(String),

    #[error("unsupported heatmap dtype {0:?} (expected \"f32le\")")]
    UnsupportedDtype(String),

    #[error("heatmap payload length mismatch: expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InvalidConfig(_) => "invalid-config",
            Error::DegenerateShape(_) => "degenerate-shape",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::RefinementFailed(_) => "refinement-failed",
            Error::Alignment(_) => "alignment",
            Error::MalformedRow { .. } => "malformed-row",
            Error::DuplicateKey { .. } => "duplicate-key",
            Error::BadHeader(_) => "bad-header",
            Error::UnsupportedDtype(_) => "unsupported-dtype",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NonFinite(_) => "non-finite",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
