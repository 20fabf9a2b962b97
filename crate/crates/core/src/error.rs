use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point has non-finite coordinate {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("noise window exhausted: slot {slot} requested but path covers [{first}, {end})")]
    WindowExhausted { slot: i64, first: i64, end: i64 },

    #[error("invalid noise model: {0}")]
    Noise(String),

    #[error("tolerance field evaluated to {value} at {point:?}; it must be finite and positive")]
    Epsilon { value: f64, point: Vec<f64> },

    #[error("invalid value for `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unsupported dimension {0}: only 2-D grids can be rendered")]
    UnsupportedDimension(usize),

    #[error("failed to parse {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
