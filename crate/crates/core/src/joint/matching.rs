use std::collections::BTreeMap;

use serde::Serialize;

use super::ontology::{Ontology, OntologyIndex};
use super::speaker::{FrameworkCollection, StatementInfo};

/// Pairs scoring below this are not part of the joint relation.
pub const MATCH_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPair {
    pub speaker_id: String,
    pub statement_id: String,
    pub concept: String,
    pub score: f64,
}

/// Joint relation between speaker statements and reader concepts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointMatch {
    pub pairs: Vec<JointPair>,
    lookup: BTreeMap<(String, String), usize>,
}

impl JointMatch {
    pub fn score(&self, statement_id: &str, concept: &str) -> Option<f64> {
        self.lookup
            .get(&(statement_id.to_owned(), concept.to_owned()))
            .map(|&i| self.pairs[i].score)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Best match of any statement term against `concept`: 1 on an exact
/// label, otherwise Wu-Palmer in the ontology when both labels are there.
pub fn term_score(index: &OntologyIndex<'_>, info: &StatementInfo, concept: &str) -> f64 {
    if info.terms.contains(concept) {
        return 1.0;
    }
    info.terms
        .iter()
        .filter_map(|t| index.similarity(t, concept))
        .fold(0.0, f64::max)
}

pub fn match_joint(collection: &FrameworkCollection, ontology: &Ontology) -> JointMatch {
    let index = ontology.similarity_index();
    let mut pairs = Vec::new();
    for member in &collection.members {
        for info in &member.statements {
            for concept in ontology.labels() {
                let score = term_score(&index, info, concept);
                if score >= MATCH_THRESHOLD {
                    pairs.push(JointPair {
                        speaker_id: member.speaker_id.clone(),
                        statement_id: info.id.clone(),
                        concept: concept.clone(),
                        score,
                    });
                }
            }
        }
    }
    pairs.sort_by(|a, b| {
        (&a.speaker_id, &a.statement_id, &a.concept).cmp(&(
            &b.speaker_id,
            &b.statement_id,
            &b.concept,
        ))
    });
    let lookup = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.statement_id.clone(), p.concept.clone()), i))
        .collect();
    JointMatch { pairs, lookup }
}

/// Mean over query tags of the best evidence for each tag: an exact term,
/// else the joint score, else 0.
pub fn statement_query_score(joint: &JointMatch, info: &StatementInfo, query: &[String]) -> f64 {
    if query.is_empty() {
        return 0.0;
    }
    let sum: f64 = query
        .iter()
        .map(|q| {
            if info.terms.contains(q) {
                1.0
            } else {
                joint.score(&info.id, q).unwrap_or(0.0)
            }
        })
        .sum();
    sum / query.len() as f64
}
