use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("label is empty after normalization")]
    EmptyLabel,
    #[error("unknown facet `{0}`")]
    UnknownFacet(String),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("concept set is not closed under meets and joins")]
    NotALattice,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("random walk graph has no subject node")]
    NoSubject,
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("invalid walk parameters: {0}")]
    InvalidWalk(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not an orthogonal projector")]
    NotAProjector,
    #[error("statements do not commute")]
    IncompatibleStatements,
    #[error("frameworks are incompatible")]
    IncompatibleFrameworks,
    #[error("boolean algebra would have {0} atoms (limit 20)")]
    AlgebraTooLarge(usize),
    #[error("statement is not an element of the framework's algebra")]
    NotInAlgebra,
    #[error("taxonomy contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("taxonomy has more than one root: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("duplicate taxonomy label `{0}`")]
    DuplicateLabel(String),
    #[error("framework collection is empty")]
    EmptyCollection,
    #[error("unknown collapse option `{0}`")]
    UnknownOption(String),
    #[error("elementary context `{0}` is not an axis of the basis")]
    UnknownAxis(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
