//! Corpus ingestion, reader sessions, the HTTP API and the evaluation
//! harness on top of `facetjoint-core`.

pub mod engine;
pub mod error;
pub mod eval;
pub mod formats;
pub mod http;
pub mod snapshot;

pub use engine::{Engine, StepResponse};
pub use error::{Result, ServiceError};
pub use snapshot::Snapshot;
