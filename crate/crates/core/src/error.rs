use thiserror::Error;

use crate::seqlang::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("temperature undefined: {0}")]
    Temperature(String),

    #[error("capacity: {0}")]
    Capacity(String),

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unit error: {0}")]
    Unit(String),

    #[error("invalid config at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unresolved auto wait `{0}`")]
    UnresolvedWait(String),

    #[error("unsupported schedule: {0}")]
    UnsupportedSchedule(String),

    #[error("unknown parameter path `{0}`")]
    UnknownPath(String),

    #[error("optimization aborted: {0}")]
    Optimization(String),
}
