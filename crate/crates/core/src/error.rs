use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse scenario file: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("slack `{name}` must be strictly positive, got {value}")]
    NonPositiveSlack { name: &'static str, value: f64 },

    #[error("speed {speed} m/s is below the hover guard of {floor} m/s")]
    SpeedBelowFloor { speed: f64, floor: f64 },

    #[error("straight-line speed {speed:.4} m/s outside [{min}, {max}] m/s")]
    StraightLineSpeed { speed: f64, min: f64, max: f64 },

    #[error("convex backend: {0}")]
    Backend(String),
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
