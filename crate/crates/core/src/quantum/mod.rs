//! Concept statements as orthogonal projectors, their Boolean algebras and
//! the compatibility rules between frameworks.

mod algebra;
mod framework;
mod projector;

pub use algebra::{generate_boolean_algebra, BooleanAlgebra, MAX_ATOMS};
pub use framework::{
    assumption_product, check_reasoning_chain, frameworks_compatible, master_description,
    projector_product, smallest_common_framework, valid_conclusion, ChainLink, ChainReport,
    ConceptStatement, Description, Framework,
};
pub use projector::{
    commutator_norm, commutes, conjoin, join, meet, negate, projector_from_extent, Projector,
    SpaceBasis, TOLERANCE,
};
