//! Core algorithms for faceted folksonomy search.
//!
//! A speaker's contributions form a formal context of (facet, tag, incidence)
//! triples. From it we enumerate formal concepts, build the concept lattice,
//! rank tags inside each facet, and map the facet concepts onto orthogonal
//! projectors so that frameworks of different speakers can be tested for
//! compatibility before their statements are combined for a reader's query.

pub mod context;
pub mod error;
pub mod joint;
pub mod label;
pub mod lattice;
pub mod quantum;
pub mod ranking;

pub use context::{FormalContext, Triple};
pub use error::{Error, Result};
pub use lattice::{ConceptLattice, FormalConcept};
