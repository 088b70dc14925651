//! Per-speaker formal contexts: facets as objects, tags as attributes.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::normalize_non_empty;
use crate::lattice::FormalConcept;

/// Degree given to a (facet, tag) pair the first time it is seen.
pub const NEUTRAL_DEGREE: f64 = 0.5;

/// One (facet, tag, incidence) association with its similarity degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub facet: String,
    pub tag: String,
    pub incidence: String,
    pub similarity_degree: f64,
    pub timestamp: Option<DateTime<Utc>>,
}

impl Triple {
    /// The `facet:tag:incidence` key used as a basis axis.
    pub fn elementary_context(&self) -> String {
        format!("{}:{}:{}", self.facet, self.tag, self.incidence)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Incidence {
    label: String,
    degree: f64,
    timestamp: Option<DateTime<Utc>>,
}

/// Facets, tags and the labelled incidence relation between them.
///
/// Every label is normalized on the way in, so two spellings of the same
/// word end up on the same facet or tag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FormalContext {
    facets: BTreeSet<String>,
    tags: BTreeSet<String>,
    incidence: BTreeMap<(String, String), Incidence>,
}

impl FormalContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or refreshes a (facet, tag) association.
    ///
    /// Known pairs keep their similarity degree and take the newest
    /// incidence label and timestamp.
    pub fn add_triple(
        &mut self,
        facet: &str,
        tag: &str,
        incidence: &str,
        timestamp: Option<DateTime<Utc>>,
    ) -> Result<()> {
        let facet = normalize_non_empty(facet)?;
        let tag = normalize_non_empty(tag)?;
        let label = normalize_non_empty(incidence)?;
        self.facets.insert(facet.clone());
        self.tags.insert(tag.clone());
        self.incidence
            .entry((facet, tag))
            .and_modify(|inc| {
                inc.label = label.clone();
                inc.timestamp = timestamp;
            })
            .or_insert(Incidence {
                label,
                degree: NEUTRAL_DEGREE,
                timestamp,
            });
        Ok(())
    }

    /// Returns a new version of the context with the triple added.
    pub fn with_triple(
        &self,
        facet: &str,
        tag: &str,
        incidence: &str,
        timestamp: Option<DateTime<Utc>>,
    ) -> Result<Self> {
        let mut next = self.clone();
        next.add_triple(facet, tag, incidence, timestamp)?;
        Ok(next)
    }

    pub fn set_degree(&mut self, facet: &str, tag: &str, degree: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&degree) {
            return Err(Error::OutOfRange(degree));
        }
        match self.incidence.get_mut(&(facet.to_owned(), tag.to_owned())) {
            Some(inc) => {
                inc.degree = degree;
                Ok(())
            }
            None if !self.facets.contains(facet) => Err(Error::UnknownFacet(facet.to_owned())),
            None => Err(Error::UnknownTag(tag.to_owned())),
        }
    }

    pub fn facets(&self) -> &BTreeSet<String> {
        &self.facets
    }

    pub fn tags(&self) -> &BTreeSet<String> {
        &self.tags
    }

    pub fn is_empty(&self) -> bool {
        self.incidence.is_empty()
    }

    pub fn len(&self) -> usize {
        self.incidence.len()
    }

    pub fn has(&self, facet: &str, tag: &str) -> bool {
        self.incidence
            .contains_key(&(facet.to_owned(), tag.to_owned()))
    }

    pub fn triple(&self, facet: &str, tag: &str) -> Option<Triple> {
        self.incidence
            .get(&(facet.to_owned(), tag.to_owned()))
            .map(|inc| Triple {
                facet: facet.to_owned(),
                tag: tag.to_owned(),
                incidence: inc.label.clone(),
                similarity_degree: inc.degree,
                timestamp: inc.timestamp,
            })
    }

    /// All triples ordered by (facet, tag).
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.incidence.iter().map(|((facet, tag), inc)| Triple {
            facet: facet.clone(),
            tag: tag.clone(),
            incidence: inc.label.clone(),
            similarity_degree: inc.degree,
            timestamp: inc.timestamp,
        })
    }

    /// Tags of a single facet.
    pub fn facet_tags(&self, facet: &str) -> BTreeSet<String> {
        self.incidence
            .range((facet.to_owned(), String::new())..)
            .take_while(|((f, _), _)| f == facet)
            .map(|((_, t), _)| t.clone())
            .collect()
    }

    /// Tags shared by every facet in `facets`; all tags for the empty set.
    pub fn derive_tags<'a, I>(&self, facets: I) -> Result<BTreeSet<String>>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut shared = self.tags.clone();
        for facet in facets {
            if !self.facets.contains(facet) {
                return Err(Error::UnknownFacet(facet.clone()));
            }
            shared.retain(|tag| self.has(facet, tag));
        }
        Ok(shared)
    }

    /// Facets carrying every tag in `tags`; all facets for the empty set.
    pub fn derive_facets<'a, I>(&self, tags: I) -> Result<BTreeSet<String>>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut shared = self.facets.clone();
        for tag in tags {
            if !self.tags.contains(tag) {
                return Err(Error::UnknownTag(tag.clone()));
            }
            shared.retain(|facet| self.has(facet, tag));
        }
        Ok(shared)
    }

    /// All formal concepts, in lectic order of their intents (NextClosure).
    pub fn enumerate_concepts(&self) -> Vec<FormalConcept> {
        let indexed = IndexedContext::new(self);
        let mut concepts = Vec::new();
        let mut intent = indexed.close(&FixedBitSet::with_capacity(indexed.tags.len()));
        loop {
            concepts.push(indexed.concept(&intent));
            match indexed.next_closure(&intent) {
                Some(next) => intent = next,
                None => break,
            }
        }
        concepts
    }

    /// 0/1 matrix with facets as rows and tags as columns, both sorted.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let rows: Vec<String> = self.facets.iter().cloned().collect();
        let cols: Vec<String> = self.tags.iter().cloned().collect();
        let entries = rows
            .iter()
            .map(|f| cols.iter().map(|t| u8::from(self.has(f, t))).collect())
            .collect();
        IncidenceMatrix {
            rows,
            cols,
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<u8>>,
}

/// Bitset view of a context used by the closure computations.
struct IndexedContext<'a> {
    facets: Vec<&'a String>,
    tags: Vec<&'a String>,
    /// facet index -> tags it carries
    rows: Vec<FixedBitSet>,
    /// tag index -> facets carrying it
    cols: Vec<FixedBitSet>,
}

impl<'a> IndexedContext<'a> {
    fn new(ctx: &'a FormalContext) -> Self {
        let facets: Vec<&String> = ctx.facets.iter().collect();
        let tags: Vec<&String> = ctx.tags.iter().collect();
        let tag_index: BTreeMap<&String, usize> =
            tags.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let facet_index: BTreeMap<&String, usize> =
            facets.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut rows = vec![FixedBitSet::with_capacity(tags.len()); facets.len()];
        let mut cols = vec![FixedBitSet::with_capacity(facets.len()); tags.len()];
        for (f, t) in ctx.incidence.keys() {
            let (fi, ti) = (facet_index[f], tag_index[t]);
            rows[fi].insert(ti);
            cols[ti].insert(fi);
        }
        Self {
            facets,
            tags,
            rows,
            cols,
        }
    }

    fn extent_of(&self, intent: &FixedBitSet) -> FixedBitSet {
        let mut extent = FixedBitSet::with_capacity(self.facets.len());
        extent.insert_range(..);
        for t in intent.ones() {
            extent.intersect_with(&self.cols[t]);
        }
        extent
    }

    fn intent_of(&self, extent: &FixedBitSet) -> FixedBitSet {
        let mut intent = FixedBitSet::with_capacity(self.tags.len());
        intent.insert_range(..);
        for f in extent.ones() {
            intent.intersect_with(&self.rows[f]);
        }
        intent
    }

    fn close(&self, intent: &FixedBitSet) -> FixedBitSet {
        self.intent_of(&self.extent_of(intent))
    }

    fn next_closure(&self, current: &FixedBitSet) -> Option<FixedBitSet> {
        let mut prefix = current.clone();
        for i in (0..self.tags.len()).rev() {
            if prefix.contains(i) {
                prefix.set(i, false);
                continue;
            }
            let mut candidate = prefix.clone();
            candidate.insert(i);
            let closed = self.close(&candidate);
            // closed must add nothing below i
            if closed
                .ones()
                .take_while(|&j| j < i)
                .all(|j| prefix.contains(j))
            {
                return Some(closed);
            }
        }
        None
    }

    fn concept(&self, intent: &FixedBitSet) -> FormalConcept {
        let extent = self.extent_of(intent);
        FormalConcept {
            extent: extent.ones().map(|f| self.facets[f].clone()).collect(),
            intent: intent.ones().map(|t| self.tags[t].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn example() -> FormalContext {
        let mut ctx = FormalContext::new();
        ctx.add_triple("f1", "t1", "x", None).unwrap();
        ctx.add_triple("f1", "t2", "x", None).unwrap();
        ctx.add_triple("f2", "t1", "x", None).unwrap();
        ctx
    }

    #[test]
    fn figure_one_triple() {
        let mut ctx = FormalContext::new();
        ctx.add_triple("Taiwan", "Hot", "Tropical", None).unwrap();
        assert_eq!(ctx.facets(), &set(&["taiwan"]));
        assert_eq!(ctx.tags(), &set(&["hot"]));
        let triples: Vec<_> = ctx.triples().collect();
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].incidence, "tropical");
        assert_eq!(triples[0].similarity_degree, 0.5);
        assert_eq!(triples[0].elementary_context(), "taiwan:hot:tropical");
    }

    #[test]
    fn insertion_is_idempotent_and_normalizing() {
        let once = FormalContext::new()
            .with_triple("Taiwan", "Hot", "Tropical", None)
            .unwrap();
        let twice = once.with_triple("Taiwan", "Hot", "Tropical", None).unwrap();
        assert_eq!(once, twice);
        let messy = FormalContext::new()
            .with_triple("  Taiwan ", "HOT", "Tropical", None)
            .unwrap();
        assert_eq!(once, messy);
    }

    #[test]
    fn reinsertion_keeps_degree_and_takes_new_label() {
        let mut ctx = FormalContext::new();
        ctx.add_triple("taiwan", "hot", "tropical", None).unwrap();
        ctx.set_degree("taiwan", "hot", 0.9).unwrap();
        let ts = "2024-05-01T10:00:00Z".parse().unwrap();
        ctx.add_triple("taiwan", "hot", "humid", Some(ts)).unwrap();
        let t = ctx.triple("taiwan", "hot").unwrap();
        assert_eq!(t.similarity_degree, 0.9);
        assert_eq!(t.incidence, "humid");
        assert_eq!(t.timestamp, Some(ts));
        assert_eq!(ctx.len(), 1);
    }

    #[test]
    fn empty_labels_rejected() {
        let mut ctx = FormalContext::new();
        assert_eq!(ctx.add_triple(" ", "t", "i", None), Err(Error::EmptyLabel));
        assert_eq!(ctx.add_triple("f", "t", "\t", None), Err(Error::EmptyLabel));
        assert!(ctx.is_empty());
    }

    #[test]
    fn derivations() {
        let ctx = example();
        assert_eq!(ctx.derive_tags(&set(&["f1"])).unwrap(), set(&["t1", "t2"]));
        assert_eq!(ctx.derive_tags(&set(&[])).unwrap(), set(&["t1", "t2"]));
        assert_eq!(ctx.derive_tags(&set(&["f1", "f2"])).unwrap(), set(&["t1"]));
        assert_eq!(
            ctx.derive_facets(&set(&["t1"])).unwrap(),
            set(&["f1", "f2"])
        );
        assert_eq!(ctx.derive_facets(&set(&[])).unwrap(), set(&["f1", "f2"]));
        assert_eq!(
            ctx.derive_facets(&set(&["t1", "t2"])).unwrap(),
            set(&["f1"])
        );
        assert_eq!(
            ctx.derive_tags(&set(&["f9"])),
            Err(Error::UnknownFacet("f9".into()))
        );
        assert_eq!(
            ctx.derive_facets(&set(&["t9"])),
            Err(Error::UnknownTag("t9".into()))
        );
    }

    #[test]
    fn concepts_of_small_examples() {
        let concepts = example().enumerate_concepts();
        assert_eq!(
            concepts,
            vec![
                FormalConcept::new(set(&["f1", "f2"]), set(&["t1"])),
                FormalConcept::new(set(&["f1"]), set(&["t1", "t2"])),
            ]
        );

        let empty = FormalContext::new().enumerate_concepts();
        assert_eq!(empty, vec![FormalConcept::new(set(&[]), set(&[]))]);

        let mut full = FormalContext::new();
        for f in ["a", "b"] {
            for t in ["x", "y", "z"] {
                full.add_triple(f, t, "i", None).unwrap();
            }
        }
        assert_eq!(
            full.enumerate_concepts(),
            vec![FormalConcept::new(set(&["a", "b"]), set(&["x", "y", "z"]))]
        );
    }

    #[test]
    fn incidence_matrix_layout() {
        let m = example().incidence_matrix();
        assert_eq!(m.rows, vec!["f1", "f2"]);
        assert_eq!(m.cols, vec!["t1", "t2"]);
        assert_eq!(m.entries, vec![vec![1, 1], vec![1, 0]]);

        let empty = FormalContext::new().incidence_matrix();
        assert!(empty.rows.is_empty() && empty.cols.is_empty() && empty.entries.is_empty());
    }

    #[test]
    fn facet_tags_stays_within_facet() {
        let ctx = example();
        assert_eq!(ctx.facet_tags("f1"), set(&["t1", "t2"]));
        assert_eq!(ctx.facet_tags("f2"), set(&["t1"]));
        assert!(ctx.facet_tags("f").is_empty());
    }
}
