use std::path::PathBuf;

/// Errors produced by the simulator, the diagnostics and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes or component counts do not fit the requested operation.
    #[error("structural error: {0}")]
    Structural(String),

    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The solution became non-finite or exceeded the configured norm ceiling.
    #[error("blow-up detected at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    /// A configuration file could not be parsed.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A configuration value failed validation.
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },

    /// A time series lookup referenced a missing label or an out-of-range time.
    #[error("series error: {0}")]
    Series(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.into(),
            message: msg.into(),
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
