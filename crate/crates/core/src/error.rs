use thiserror::Error;

use crate::model::ModelKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{model}` has no parameter `{name}`")]
    UnknownParameter { model: ModelKind, name: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical blow-up at t = {time} (non-finite state)")]
    NumericalBlowup { time: f64 },

    #[error("band selection: {0}")]
    BandSelection(String),

    #[error("malformed trajectory CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
