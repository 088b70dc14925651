//! Formal concepts, their order and the concept lattice with reduced labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormalConcept {
    pub extent: BTreeSet<String>,
    pub intent: BTreeSet<String>,
}

impl FormalConcept {
    pub fn new(extent: BTreeSet<String>, intent: BTreeSet<String>) -> Self {
        Self { extent, intent }
    }

    /// Subconcept test: `self <= other` iff the extent of `self` is contained
    /// in the extent of `other`.
    pub fn leq(&self, other: &FormalConcept) -> bool {
        self.extent.is_subset(&other.extent)
    }
}

/// Subconcept-superconcept order over the concepts of one context.
///
/// Nodes are indices into `concepts`. Cover edges run from the lower node to
/// the upper one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptLattice {
    pub concepts: Vec<FormalConcept>,
    pub cover_edges: Vec<(usize, usize)>,
    pub top: usize,
    pub bottom: usize,
    pub facet_labels: BTreeMap<String, usize>,
    pub tag_labels: BTreeMap<String, usize>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
}

impl ConceptLattice {
    /// Builds the lattice from the complete concept set of one context.
    pub fn build(concepts: Vec<FormalConcept>) -> Result<Self> {
        let n = concepts.len();
        if n == 0 {
            return Err(Error::NotALattice);
        }
        let by_extent: HashMap<&BTreeSet<String>, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (&c.extent, i))
            .collect();
        let by_intent: HashMap<&BTreeSet<String>, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (&c.intent, i))
            .collect();
        if by_extent.len() != n || by_intent.len() != n {
            return Err(Error::NotALattice);
        }
        // meets intersect extents, joins intersect intents
        for (i, a) in concepts.iter().enumerate() {
            for b in &concepts[i + 1..] {
                let meet: BTreeSet<String> = a.extent.intersection(&b.extent).cloned().collect();
                let join: BTreeSet<String> = a.intent.intersection(&b.intent).cloned().collect();
                if !by_extent.contains_key(&meet) || !by_intent.contains_key(&join) {
                    return Err(Error::NotALattice);
                }
            }
        }

        let leq: Vec<Vec<bool>> = concepts
            .iter()
            .map(|a| concepts.iter().map(|b| a.leq(b)).collect())
            .collect();
        let top = (0..n)
            .find(|&t| (0..n).all(|j| leq[j][t]))
            .ok_or(Error::NotALattice)?;
        let bottom = (0..n)
            .find(|&b| (0..n).all(|j| leq[b][j]))
            .ok_or(Error::NotALattice)?;

        let mut cover_edges = Vec::new();
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for lo in 0..n {
            for hi in 0..n {
                if lo == hi || !leq[lo][hi] {
                    continue;
                }
                let between = (0..n).any(|k| k != lo && k != hi && leq[lo][k] && leq[k][hi]);
                if !between {
                    cover_edges.push((lo, hi));
                    upper_covers[lo].push(hi);
                    lower_covers[hi].push(lo);
                }
            }
        }

        let mut facet_labels = BTreeMap::new();
        let facets: BTreeSet<&String> = concepts.iter().flat_map(|c| &c.extent).collect();
        for facet in facets {
            let node = (0..n)
                .filter(|&i| concepts[i].extent.contains(facet))
                .min_by_key(|&i| concepts[i].extent.len())
                .ok_or(Error::NotALattice)?;
            facet_labels.insert(facet.clone(), node);
        }
        let mut tag_labels = BTreeMap::new();
        let tags: BTreeSet<&String> = concepts.iter().flat_map(|c| &c.intent).collect();
        for tag in tags {
            let node = (0..n)
                .filter(|&i| concepts[i].intent.contains(tag))
                .max_by_key(|&i| (concepts[i].extent.len(), std::cmp::Reverse(i)))
                .ok_or(Error::NotALattice)?;
            tag_labels.insert(tag.clone(), node);
        }

        Ok(Self {
            concepts,
            cover_edges,
            top,
            bottom,
            facet_labels,
            tag_labels,
            upper_covers,
            lower_covers,
        })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn leq(&self, lower: usize, upper: usize) -> bool {
        self.concepts[lower].leq(&self.concepts[upper])
    }

    /// Immediate superconcepts of `node`.
    pub fn upper_covers(&self, node: usize) -> &[usize] {
        &self.upper_covers[node]
    }

    /// Immediate subconcepts of `node`.
    pub fn lower_covers(&self, node: usize) -> &[usize] {
        &self.lower_covers[node]
    }

    pub fn facet_node(&self, facet: &str) -> Option<usize> {
        self.facet_labels.get(facet).copied()
    }

    pub fn tag_node(&self, tag: &str) -> Option<usize> {
        self.tag_labels.get(tag).copied()
    }

    /// Facets whose reduced label sits on `node`.
    pub fn facets_at(&self, node: usize) -> impl Iterator<Item = &String> {
        self.facet_labels
            .iter()
            .filter(move |(_, &n)| n == node)
            .map(|(f, _)| f)
    }

    /// Tags whose reduced label sits on `node`.
    pub fn tags_at(&self, node: usize) -> impl Iterator<Item = &String> {
        self.tag_labels
            .iter()
            .filter(move |(_, &n)| n == node)
            .map(|(t, _)| t)
    }
}
