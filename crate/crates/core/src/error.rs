//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model `{0}` is already registered")]
    DuplicateModel(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid model spec: {0}")]
    InvalidModelSpec(String),

    #[error("model `{0}` has no plant mapping; register parameter names matching a built-in layout")]
    UnsupportedPlant(String),

    #[error("non-physical parameter: `{name}` = {value} is below its floor {floor}")]
    NonPhysical {
        name: String,
        value: f64,
        floor: f64,
    },

    #[error("simulation diverged at step {step} (t = {t_ms} ms)")]
    Divergence { step: usize, t_ms: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("validation failed for saccade {saccade_id}: opt_err {opt_err} vs cpu_check {cpu_check}")]
    Validation {
        saccade_id: usize,
        opt_err: f64,
        cpu_check: f64,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
