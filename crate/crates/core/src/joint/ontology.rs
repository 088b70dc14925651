use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::label::normalize_non_empty;
use crate::ranking::{Hierarchy, TaxonomyIndex};

pub const ONTOLOGY_ROOT: &str = "entity";

/// Reader-side taxonomy: a tree of normalized labels rooted at `entity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ontology {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
}

impl Ontology {
    /// Builds the tree from `(child, parent)` edges; `entity` is implicit.
    pub fn from_edges<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut parent_of: BTreeMap<String, String> = BTreeMap::new();
        let mut names: BTreeSet<String> = BTreeSet::new();
        for (child, parent) in edges {
            let child = normalize_non_empty(child.as_ref())?;
            let parent = normalize_non_empty(parent.as_ref())?;
            if child == ONTOLOGY_ROOT || parent_of.contains_key(&child) {
                return Err(Error::DuplicateLabel(child));
            }
            names.insert(child.clone());
            names.insert(parent.clone());
            parent_of.insert(child, parent);
        }
        names.remove(ONTOLOGY_ROOT);

        for start in parent_of.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = start;
            while let Some(p) = parent_of.get(cur) {
                if !seen.insert(cur) {
                    return Err(Error::CycleDetected(cur.clone()));
                }
                cur = p;
            }
        }
        let mut roots: Vec<String> = names
            .iter()
            .filter(|n| !parent_of.contains_key(*n))
            .cloned()
            .collect();
        if !roots.is_empty() {
            roots.insert(0, ONTOLOGY_ROOT.to_owned());
            return Err(Error::MultipleRoots(roots));
        }

        let labels: Vec<String> = std::iter::once(ONTOLOGY_ROOT.to_owned())
            .chain(names)
            .collect();
        let index: BTreeMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let parents = labels
            .iter()
            .map(|l| parent_of.get(l).map(|p| vec![index[p]]).unwrap_or_default())
            .collect();
        Ok(Self {
            labels,
            index,
            parents,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn parent(&self, label: &str) -> Option<&str> {
        let node = self.node(label)?;
        self.parents[node].first().map(|&p| self.labels[p].as_str())
    }

    /// Precomputed depths for repeated similarity lookups.
    pub fn similarity_index(&self) -> OntologyIndex<'_> {
        OntologyIndex {
            ontology: self,
            taxonomy: TaxonomyIndex::new(self),
        }
    }

    /// Wu-Palmer similarity of two labels, `None` if either is absent.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        self.similarity_index().similarity(a, b)
    }
}

impl Hierarchy for Ontology {
    fn node_count(&self) -> usize {
        self.labels.len()
    }

    fn root(&self) -> usize {
        0
    }

    fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    fn node_id(&self, node: usize) -> String {
        self.labels[node].clone()
    }
}

pub struct OntologyIndex<'o> {
    ontology: &'o Ontology,
    taxonomy: TaxonomyIndex<'o, Ontology>,
}

impl OntologyIndex<'_> {
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let x = self.ontology.node(a)?;
        let y = self.ontology.node(b)?;
        self.taxonomy.wu_palmer(x, y).ok()
    }

    pub fn depth(&self, label: &str) -> Option<usize> {
        self.taxonomy.depth(self.ontology.node(label)?).ok()
    }
}

/// Parses `child<TAB>parent` lines; blank lines and `#` comments are skipped.
pub fn load_ontology(source: &str) -> Result<Ontology> {
    let mut edges = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        edges.push((fields[0], fields[1]));
    }
    Ontology::from_edges(edges)
}
