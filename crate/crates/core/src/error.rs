use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("non-finite value produced by {op}")]
    Numeric { op: &'static str },

    #[error("invalid config `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("payload kind error: {0}")]
    Kind(String),

    #[error("dataset role error: {0}")]
    Role(String),

    #[error("quarantine violation: {0}")]
    Quarantine(String),

    #[error("theorem assumption violated ({assumption}): {detail}")]
    Assumption { assumption: &'static str, detail: String },

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
