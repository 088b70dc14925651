use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::matching::{match_joint, statement_query_score, JointMatch};
use super::ontology::{Ontology, OntologyIndex};
use super::selection::{collapse, score_frameworks, select_from_scores, CollapseChoice, Selection};
use super::speaker::{build_speaker_frameworks, corpus_basis, FrameworkCollection};
use crate::context::{FormalContext, NEUTRAL_DEGREE};
use crate::error::{Error, Result};
use crate::label::normalize_non_empty;
use crate::quantum::Framework;
use crate::ranking::{directory_rank, update_similarity_degree};

/// One speaker's (facet, tag, incidence) contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: String,
    pub speaker_id: String,
    pub facet: String,
    pub tag: String,
    pub incidence: String,
    pub timestamp: Option<DateTime<Utc>>,
    pub body: Option<String>,
}

impl Contribution {
    /// Normalizes the labels; the id and body are kept verbatim.
    pub fn new(
        id: impl Into<String>,
        speaker_id: &str,
        facet: &str,
        tag: &str,
        incidence: &str,
        timestamp: Option<DateTime<Utc>>,
        body: Option<String>,
    ) -> Result<Self> {
        Ok(Self {
            id: id.into(),
            speaker_id: normalize_non_empty(speaker_id)?,
            facet: normalize_non_empty(facet)?,
            tag: normalize_non_empty(tag)?,
            incidence: normalize_non_empty(incidence)?,
            timestamp,
            body,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedResult {
    pub contribution_id: String,
    pub speaker_id: String,
    pub facet: String,
    pub tag: String,
    pub body: Option<String>,
    pub score: f64,
    pub degree: f64,
}

/// Per-reader memory carried between queries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReaderState {
    /// Collapse key to the option the reader kept.
    pub decisions: BTreeMap<String, String>,
    /// Similarity degrees moved by this reader's matches, by contribution id.
    pub degrees: BTreeMap<String, f64>,
}

impl ReaderState {
    /// Records a collapse decision and returns the retained speakers.
    pub fn decide(&mut self, choice: &CollapseChoice, selection: &str) -> Result<Vec<String>> {
        let mut choice = choice.clone();
        let members = collapse(&mut choice, selection)?;
        let chosen = choice.chosen.clone().expect("collapse sets the choice");
        self.decisions.insert(choice.key(), chosen);
        Ok(members)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Ranked {
        results: Vec<RankedResult>,
        /// Speakers whose frameworks answered the query.
        subset: Vec<String>,
        /// Present when an earlier collapse decision was applied.
        choice: Option<CollapseChoice>,
    },
    CollapseRequired(CollapseChoice),
}

/// Everything derived from one corpus that queries are resolved against.
#[derive(Debug, Clone)]
pub struct SemanticIndex {
    pub contributions: Vec<Contribution>,
    pub collection: FrameworkCollection,
    pub ontology: Arc<Ontology>,
    pub joint: JointMatch,
    /// DirectoryRank by (speaker, facet) then tag.
    pub directory: BTreeMap<(String, String), BTreeMap<String, f64>>,
}

impl SemanticIndex {
    pub fn build(contributions: Vec<Contribution>, ontology: Arc<Ontology>) -> Result<Self> {
        let mut speakers: BTreeMap<String, FormalContext> = BTreeMap::new();
        for c in &contributions {
            speakers
                .entry(c.speaker_id.clone())
                .or_default()
                .add_triple(&c.facet, &c.tag, &c.incidence, c.timestamp)?;
        }
        let basis = Arc::new(corpus_basis(&speakers)?);
        let collection = build_speaker_frameworks(&speakers, basis)?;
        let joint = match_joint(&collection, &ontology);
        let mut directory = BTreeMap::new();
        for member in &collection.members {
            for facet in member.context.facets() {
                let ranks = directory_rank(&member.context, facet, &member.lattice)?;
                directory.insert(
                    (member.speaker_id.clone(), facet.clone()),
                    ranks.into_iter().map(|r| (r.tag, r.score)).collect(),
                );
            }
        }
        Ok(Self {
            contributions,
            collection,
            ontology,
            joint,
            directory,
        })
    }

    pub fn directory_rank(&self, speaker: &str, facet: &str, tag: &str) -> f64 {
        self.directory
            .get(&(speaker.to_owned(), facet.to_owned()))
            .and_then(|m| m.get(tag))
            .copied()
            .unwrap_or(0.0)
    }

    /// Joint score of the facet's own statement for this query.
    fn facet_score(&self, speaker: &str, facet: &str, query: &[String]) -> f64 {
        let Some(member) = self.collection.get(speaker) else {
            return 0.0;
        };
        member
            .facet_statement(facet)
            .map(|i| statement_query_score(&self.joint, &member.statements[i], query))
            .unwrap_or(0.0)
    }

    /// What the reader's query says about one contribution's tag: 1 for an
    /// exact hit, else the best ontology similarity.
    fn observed_match(index: &OntologyIndex<'_>, tag: &str, query: &[String]) -> f64 {
        if query.iter().any(|q| q == tag) {
            return 1.0;
        }
        query
            .iter()
            .filter_map(|q| index.similarity(tag, q))
            .fold(0.0, f64::max)
    }
}

/// Runs match, selection and ranking for one query.
///
/// Contributions of the selected speakers score the joint score of their
/// facet statement times the DirectoryRank of their tag. Results are sorted
/// by score, then degree, then id. A contribution is matched when its facet
/// statement scores above zero, even if its tag's DirectoryRank is zero.
/// Matched contributions move their degree toward the observed match.
pub fn resolve_query(
    index: &SemanticIndex,
    query: &[String],
    facet: Option<&str>,
    state: &mut ReaderState,
) -> Result<Resolution> {
    let scores = score_frameworks(&index.collection, &index.joint, query, facet);
    let (subset, choice) = match select_from_scores(&index.collection, &scores)? {
        Selection::Chosen(subset) => (subset, None),
        Selection::Collapse(mut choice) => {
            let Some(decided) = state.decisions.get(&choice.key()).cloned() else {
                return Ok(Resolution::CollapseRequired(choice));
            };
            let subset = collapse(&mut choice, &decided)?;
            (subset, Some(choice))
        }
    };
    let frameworks: Vec<&Framework> = subset
        .iter()
        .filter_map(|s| index.collection.get(s))
        .map(|m| &m.framework)
        .collect();
    if !crate::quantum::frameworks_compatible(&frameworks) {
        return Err(Error::IncompatibleFrameworks);
    }

    let chosen: BTreeSet<&str> = subset.iter().map(String::as_str).collect();
    let mut facet_scores: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    let mut results = Vec::new();
    for c in &index.contributions {
        if !chosen.contains(c.speaker_id.as_str()) || facet.is_some_and(|f| f != c.facet) {
            continue;
        }
        let joint = *facet_scores
            .entry((&c.speaker_id, &c.facet))
            .or_insert_with(|| index.facet_score(&c.speaker_id, &c.facet, query));
        if joint <= 0.0 {
            continue;
        }
        let score = joint * index.directory_rank(&c.speaker_id, &c.facet, &c.tag);
        let degree = state.degrees.get(&c.id).copied().unwrap_or(NEUTRAL_DEGREE);
        results.push(RankedResult {
            contribution_id: c.id.clone(),
            speaker_id: c.speaker_id.clone(),
            facet: c.facet.clone(),
            tag: c.tag.clone(),
            body: c.body.clone(),
            score,
            degree,
        });
    }
    results.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.degree.total_cmp(&a.degree))
            .then_with(|| a.contribution_id.cmp(&b.contribution_id))
    });
    let similarity = index.ontology.similarity_index();
    for r in &mut results {
        let observed = SemanticIndex::observed_match(&similarity, &r.tag, query);
        r.degree = update_similarity_degree(r.degree, observed)?;
        state.degrees.insert(r.contribution_id.clone(), r.degree);
    }
    Ok(Resolution::Ranked {
        results,
        subset,
        choice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::ontology::load_ontology;

    fn contributions(rows: &[(&str, &str, &str, &str, &str)]) -> Vec<Contribution> {
        rows.iter()
            .enumerate()
            .map(|(i, (s, f, t, inc, body))| {
                Contribution::new(
                    format!("c{}", i + 1),
                    s,
                    f,
                    t,
                    inc,
                    None,
                    Some(body.to_string()),
                )
                .unwrap()
            })
            .collect()
    }

    fn ontology() -> Arc<Ontology> {
        Arc::new(
            load_ontology(
                "artifact\tentity\nclothing\tartifact\nshirt\tclothing\ntrousers\tclothing\nsuit\tclothing\ndress\tclothing\nstyle\tentity\n",
            )
            .unwrap(),
        )
    }

    fn query(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn fashion() -> SemanticIndex {
        let rows = contributions(&[
            ("women-style", "fashion", "style", "elegant", "w1"),
            ("women-style", "fashion", "dress", "i", "w2"),
            ("men-style", "fashion", "style", "elegant", "m1"),
            ("men-style", "fashion", "suit", "i", "m2"),
        ]);
        SemanticIndex::build(rows, ontology()).unwrap()
    }

    #[test]
    fn exact_single_tag() {
        let rows = contributions(&[("u", "wardrobe", "shirt", "i", "only")]);
        let index = SemanticIndex::build(rows, ontology()).unwrap();
        let mut state = ReaderState::default();
        let Resolution::Ranked { results, .. } =
            resolve_query(&index, &query(&["shirt"]), None, &mut state).unwrap()
        else {
            panic!("no collapse expected");
        };
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].contribution_id, "c1");
        assert_eq!(
            results[0].score,
            index.directory_rank("u", "wardrobe", "shirt")
        );
        assert!((results[0].degree - 0.65).abs() < 1e-12);
    }

    #[test]
    fn no_match_is_empty() {
        let index = fashion();
        let mut state = ReaderState::default();
        let r = resolve_query(&index, &query(&["penguin"]), None, &mut state).unwrap();
        assert!(matches!(r, Resolution::Ranked { ref results, .. } if results.is_empty()));
        assert!(state.degrees.is_empty());
    }

    #[test]
    fn collapse_then_resolve() {
        let index = fashion();
        let mut state = ReaderState::default();
        let q = query(&["fashion", "style"]);
        let Resolution::CollapseRequired(choice) =
            resolve_query(&index, &q, None, &mut state).unwrap()
        else {
            panic!("expected a collapse");
        };
        assert_eq!(choice.options.len(), 2);
        state.decide(&choice, "men-style").unwrap();
        let Resolution::Ranked {
            results,
            subset,
            choice,
        } = resolve_query(&index, &q, None, &mut state).unwrap()
        else {
            panic!("decision should be reused");
        };
        assert_eq!(subset, ["men-style"]);
        assert!(results.iter().all(|r| r.speaker_id == "men-style"));
        assert_eq!(choice.unwrap().excluded, ["women-style"]);

        // going back on the decision
        let pending = fashion();
        let Resolution::CollapseRequired(c2) =
            resolve_query(&pending, &q, None, &mut ReaderState::default()).unwrap()
        else {
            panic!("fresh reader must collapse");
        };
        state.decide(&c2, "women-style").unwrap();
        let Resolution::Ranked { subset, .. } =
            resolve_query(&index, &q, None, &mut state).unwrap()
        else {
            panic!("decision should be reused");
        };
        assert_eq!(subset, ["women-style"]);
    }

    #[test]
    fn facet_filter_restricts_results() {
        let rows = contributions(&[
            ("a", "wardrobe", "shirt", "i", "x"),
            ("a", "closet", "trousers", "i", "y"),
        ]);
        let index = SemanticIndex::build(rows, ontology()).unwrap();
        let mut state = ReaderState::default();
        let q = query(&["shirt"]);
        let Resolution::Ranked { results, .. } =
            resolve_query(&index, &q, Some("closet"), &mut state).unwrap()
        else {
            panic!();
        };
        assert!(results.iter().all(|r| r.facet == "closet"));
        assert_eq!(results.len(), 1);
    }

    #[test]
    fn deterministic_given_state() {
        let index = fashion();
        let q = query(&["suit"]);
        let run = || {
            let mut s = ReaderState::default();
            let a = resolve_query(&index, &q, None, &mut s).unwrap();
            let b = resolve_query(&index, &q, None, &mut s).unwrap();
            (a, b, s)
        };
        assert_eq!(run(), run());
    }
}
