//! Speaker frameworks, their joint relation with the reader's ontology, and
//! query resolution with reader-driven collapse.

mod matching;
mod ontology;
mod resolve;
mod selection;
mod speaker;

pub use matching::{
    match_joint, statement_query_score, term_score, JointMatch, JointPair, MATCH_THRESHOLD,
};
pub use ontology::{load_ontology, Ontology, OntologyIndex, ONTOLOGY_ROOT};
pub use resolve::{
    resolve_query, Contribution, RankedResult, ReaderState, Resolution, SemanticIndex,
};
pub use selection::{
    collapse, score_frameworks, select_compatible_subset, select_from_scores, CollapseChoice,
    CollapseOption, FrameworkScore, Selection, TIE_MARGIN,
};
pub use speaker::{
    build_speaker_frameworks, corpus_basis, FrameworkCollection, SpeakerLattice, StatementInfo,
};
