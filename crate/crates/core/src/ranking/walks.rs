use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

pub const DEFAULT_CONTINUE_PROB: f64 = 0.8;
pub const DEFAULT_MAX_LEN: usize = 4;

/// Directed graph of labelled tag nodes with one unlabelled subject.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledTagGraph {
    ids: Vec<String>,
    labels: Vec<String>,
    edges: Vec<Vec<usize>>,
    subject: Option<usize>,
}

impl LabeledTagGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node (or returns the existing one with the same id).
    pub fn add_node(&mut self, id: &str, label: &str) -> usize {
        if let Some(i) = self.index(id) {
            return i;
        }
        self.ids.push(id.to_owned());
        self.labels.push(label.to_owned());
        self.edges.push(Vec::new());
        self.ids.len() - 1
    }

    /// Adds the subject node; its label is never part of a path.
    pub fn add_subject(&mut self, id: &str) -> usize {
        let i = self.add_node(id, "");
        self.subject = Some(i);
        i
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.edges[from].push(to);
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn subject(&self) -> Option<usize> {
        self.subject
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.edges[node]
    }

    /// Walk graph rooted at a facet's concept, following cover edges upward
    /// to the concepts of the tags it uses.
    ///
    /// A node is labelled by its reduced tag labels; nodes without one use
    /// their intent, and an empty intent becomes `*`.
    pub fn from_lattice(lattice: &ConceptLattice, facet: &str) -> Result<Self> {
        let start = lattice
            .facet_node(facet)
            .ok_or_else(|| Error::UnknownFacet(facet.to_owned()))?;
        let label_of = |node: usize| {
            let tags: Vec<&str> = lattice.tags_at(node).map(String::as_str).collect();
            if !tags.is_empty() {
                tags.join(",")
            } else if lattice.concepts[node].intent.is_empty() {
                "*".to_owned()
            } else {
                let intent: Vec<&str> = lattice.concepts[node]
                    .intent
                    .iter()
                    .map(String::as_str)
                    .collect();
                intent.join("+")
            }
        };
        let mut graph = LabeledTagGraph::new();
        let mut map = BTreeMap::new();
        map.insert(start, graph.add_subject(&format!("{start}")));
        let mut queue = vec![start];
        while let Some(node) = queue.pop() {
            for &up in lattice.upper_covers(node) {
                let to = *map.entry(up).or_insert_with(|| {
                    queue.push(up);
                    graph.add_node(&format!("{up}"), &label_of(up))
                });
                graph.add_edge(map[&node], to);
            }
        }
        Ok(graph)
    }
}

/// Probability of each label sequence a walk from the subject produces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkDistribution {
    pub paths: Vec<(Vec<String>, f64)>,
}

impl WalkDistribution {
    pub fn total_mass(&self) -> f64 {
        self.paths.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, labels: &[&str]) -> f64 {
        self.paths
            .iter()
            .find(|(seq, _)| seq.iter().map(String::as_str).eq(labels.iter().copied()))
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Exact enumeration of walks of 1..=`max_len` steps from the subject.
///
/// Each step continues with `continue_prob` split evenly over the
/// successors; a walk stops with `1 - continue_prob`, or surely at a sink.
/// Walks still running after `max_len` steps are dropped, not renormalized.
pub fn enumerate_walks(
    graph: &LabeledTagGraph,
    max_len: usize,
    continue_prob: f64,
) -> Result<WalkDistribution> {
    if max_len == 0 {
        return Err(Error::InvalidWalk("max_len must be at least 1"));
    }
    if !(continue_prob > 0.0 && continue_prob < 1.0) {
        return Err(Error::InvalidWalk("continue_prob must lie in (0, 1)"));
    }
    let subject = graph.subject.ok_or(Error::NoSubject)?;
    let mut mass: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    let mut stack: Vec<(usize, Vec<String>, f64)> = Vec::new();
    let first = graph.successors(subject);
    for &next in first {
        stack.push((
            next,
            vec![graph.label(next).to_owned()],
            continue_prob / first.len() as f64,
        ));
    }
    while let Some((node, seq, p)) = stack.pop() {
        let succ = graph.successors(node);
        if succ.is_empty() {
            *mass.entry(seq).or_insert(0.0) += p;
            continue;
        }
        *mass.entry(seq.clone()).or_insert(0.0) += p * (1.0 - continue_prob);
        if seq.len() == max_len {
            continue;
        }
        let step = p * continue_prob / succ.len() as f64;
        for &next in succ {
            let mut longer = seq.clone();
            longer.push(graph.label(next).to_owned());
            stack.push((next, longer, step));
        }
    }
    Ok(WalkDistribution {
        paths: mass.into_iter().collect(),
    })
}

/// Sum over identical label sequences of the product of their walk
/// probabilities in the two graphs.
pub fn graph_similarity(
    g1: &LabeledTagGraph,
    g2: &LabeledTagGraph,
    max_len: usize,
    continue_prob: f64,
) -> Result<f64> {
    let d1 = enumerate_walks(g1, max_len, continue_prob)?;
    let d2 = enumerate_walks(g2, max_len, continue_prob)?;
    let lookup: BTreeMap<&Vec<String>, f64> = d2.paths.iter().map(|(s, p)| (s, *p)).collect();
    Ok(d1
        .paths
        .iter()
        .filter_map(|(s, p)| lookup.get(s).map(|q| p * q))
        .sum())
}
