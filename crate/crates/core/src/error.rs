use std::path::PathBuf;

use thiserror::Error;

use crate::state::State;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory ends at {end:?} but the next one starts at {start:?}")]
    EndpointMismatch { end: State, start: State },

    #[error("primitives are not geometrically continuous")]
    Discontinuous,

    #[error("scenario generation failed: {0}")]
    GenerationFailed(String),

    #[error("iteration budget of {0} exceeded")]
    IterationBudgetExceeded(usize),

    #[error("graph budget of {0} edges exceeded")]
    EdgeBudgetExceeded(usize),

    #[error("{what} state {state:?} is not on the lattice")]
    Snap { what: &'static str, state: State },

    #[error("complete graph would have {nodes} nodes (limit {limit})")]
    SizeGuard { nodes: usize, limit: usize },

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("scenario `{0}` has no row for the reference configuration")]
    MissingReference(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}, column {column}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            line: source.line(),
            column: source.column(),
            source,
        }
    }
}
