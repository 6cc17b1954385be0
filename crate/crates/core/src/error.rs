//! Crate-wide error type.

use crate::model::TrainHistory;

/// Errors produced by any module in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Matrix operands with incompatible shapes.
    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },

    /// Paired slices whose lengths must agree.
    #[error("length mismatch in {context}: expected {expected}, found {found}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// A NaN or infinity where only finite values are allowed.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Class index outside `0..num_classes`.
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    /// An operation that needs at least one element got none.
    #[error("empty input in {0}")]
    Empty(&'static str),

    /// Point cloud with too few points for a statistic to be meaningful.
    #[error("cloud has {found} points, need at least {required}")]
    TooFewPoints { found: usize, required: usize },

    /// Cropping removed every point.
    #[error("no points remain inside the crop bounds")]
    EmptyAfterCrop,

    /// A configuration or generator parameter outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Batch members must all have the same point count.
    #[error("ragged batch: cloud {index} has {found} points, expected {expected}")]
    RaggedBatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    /// Training hit a non-finite loss; the history gathered so far is kept.
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Diverged {
        epoch: usize,
        history: Box<TrainHistory>,
    },

    /// Malformed checkpoint bytes.
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    /// Malformed or inconsistent dataset manifest.
    #[error("bad manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
