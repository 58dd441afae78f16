use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed tensor header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("non-finite value at flat index {index}")]
    NonFiniteValue { index: usize },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed image: {0}")]
    MalformedImage(String),
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid transform size {0}")]
    InvalidSize(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("planes must be square, got {height}x{width}")]
    NonSquarePlane { height: usize, width: usize },
    #[error("cutoff {0} outside [0, 1]")]
    CutoffOutOfRange(f64),
    #[error("batch energy {0:e} is too small to normalise")]
    ZeroEnergyBatch(f64),

    #[error("Beta concentration must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("minimum cutoff must lie in [0, 1], got {0}")]
    InvalidTau(f64),
    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("reference errors for {0} sum to zero")]
    ZeroReference(String),
    #[error("corruption table is empty")]
    EmptyTable,
    #[error("invalid corruption table: {0}")]
    InvalidTable(String),
    #[error("shape bias undefined without any correct shape or texture decision")]
    NoCorrectDecisions,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid synthetic dataset spec: {0}")]
    InvalidSpec(String),
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    DivergedTraining { epoch: usize, loss: f64 },
    #[error("predictor failed: {0}")]
    Predictor(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ZeroEnergyBatch(_) | Error::DivergedTraining { .. }
        )
    }
}
