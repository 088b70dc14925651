//! Tag importance and tag similarity.

mod directory;
mod taxonomy;
mod vector;
mod walks;

pub use directory::{
    directory_rank, topic_relevance, topic_vectors, update_similarity_degree, DirectoryRankScore,
    DEGREE_LEARNING_RATE,
};
pub use taxonomy::{depth, lcs, wu_palmer, wu_palmer_nodes, Hierarchy, TaxonomyIndex};
pub use vector::{cosine, TagVector};
pub use walks::{
    enumerate_walks, graph_similarity, LabeledTagGraph, WalkDistribution, DEFAULT_CONTINUE_PROB,
    DEFAULT_MAX_LEN,
};
