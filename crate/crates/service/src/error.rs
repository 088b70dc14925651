use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] facetjoint_core::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("corpus has no contributions")]
    EmptyCorpus,
    #[error("no corpus has been ingested")]
    NoSnapshot,
    #[error("unknown snapshot `{0}`")]
    UnknownSnapshot(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("facet `{0}` is not among the offered refinements")]
    UnknownFacet(String),
    #[error("session has no active query")]
    NoActiveQuery,
    #[error("no collapse choice is pending")]
    NoPendingChoice,
    #[error("query log is empty")]
    EmptyLog,
    #[error("retrieved set is empty")]
    EmptyRetrieved,
    #[error("relevant set is empty")]
    EmptyRelevant,
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl ServiceError {
    /// Stable machine-readable name used in JSON error bodies.
    pub fn kind(&self) -> &'static str {
        use facetjoint_core::Error as C;
        match self {
            ServiceError::Core(C::UnknownOption(_)) => "UnknownOption",
            ServiceError::Core(C::IncompatibleFrameworks) => "IncompatibleFrameworks",
            ServiceError::Core(C::Parse { .. }) => "ParseError",
            ServiceError::Core(_) => "CoreError",
            ServiceError::Parse { .. } => "ParseError",
            ServiceError::EmptyCorpus => "EmptyCorpus",
            ServiceError::NoSnapshot => "NoSnapshot",
            ServiceError::UnknownSnapshot(_) => "UnknownSnapshot",
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::UnknownFacet(_) => "UnknownFacet",
            ServiceError::NoActiveQuery => "NoActiveQuery",
            ServiceError::NoPendingChoice => "NoPendingChoice",
            ServiceError::EmptyLog => "EmptyLog",
            ServiceError::EmptyRetrieved => "EmptyRetrieved",
            ServiceError::EmptyRelevant => "EmptyRelevant",
            ServiceError::Io(_) => "IoError",
            ServiceError::Json(_) => "JsonError",
        }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
