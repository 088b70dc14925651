use std::sync::Arc;

use facetjoint_core::joint::{Contribution, Ontology, SemanticIndex};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::formats::parse_contributions;

/// Immutable corpus state that sessions query against.
#[derive(Debug)]
pub struct Snapshot {
    pub id: String,
    pub index: SemanticIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotInfo {
    pub snapshot_id: String,
    pub contributions: usize,
    pub speakers: usize,
    pub facets: usize,
    pub tags: usize,
    pub axes: usize,
    pub mean_nodes_per_context: f64,
}

#[derive(Serialize)]
struct Canonical<'a> {
    contributions: &'a [Contribution],
    taxonomy: Vec<(&'a str, Option<&'a str>)>,
}

/// `snap-` plus the first 16 hex digits of the SHA-256 of the normalized
/// contributions and taxonomy.
pub fn snapshot_digest(contributions: &[Contribution], ontology: &Ontology) -> String {
    let canonical = Canonical {
        contributions,
        taxonomy: ontology
            .labels()
            .iter()
            .map(|l| (l.as_str(), ontology.parent(l)))
            .collect(),
    };
    let bytes = serde_json::to_vec(&canonical).expect("plain data serializes");
    let digest = Sha256::digest(&bytes);
    format!("snap-{}", &hex::encode(digest)[..16])
}

impl Snapshot {
    pub fn build(contributions: Vec<Contribution>, ontology: Arc<Ontology>) -> Result<Self> {
        let id = snapshot_digest(&contributions, &ontology);
        let index = SemanticIndex::build(contributions, ontology)?;
        Ok(Self { id, index })
    }

    pub fn from_text(text: &str, ontology: Arc<Ontology>) -> Result<Self> {
        Self::build(parse_contributions(text)?, ontology)
    }

    /// Mean number of lattice nodes over the speakers' contexts.
    pub fn mean_nodes_per_context(&self) -> f64 {
        let members = &self.index.collection.members;
        if members.is_empty() {
            return 0.0;
        }
        members.iter().map(|m| m.lattice.len()).sum::<usize>() as f64 / members.len() as f64
    }

    pub fn info(&self) -> SnapshotInfo {
        let members = &self.index.collection.members;
        SnapshotInfo {
            snapshot_id: self.id.clone(),
            contributions: self.index.contributions.len(),
            speakers: members.len(),
            facets: members.iter().map(|m| m.context.facets().len()).sum(),
            tags: members.iter().map(|m| m.context.tags().len()).sum(),
            axes: self.index.collection.basis.dimension(),
            mean_nodes_per_context: self.mean_nodes_per_context(),
        }
    }
}
