//! Precision, recall and usage statistics over the query log.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use facetjoint_core::label::normalize;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

pub fn precision<T: Ord>(retrieved: &BTreeSet<T>, relevant: &BTreeSet<T>) -> Result<f64> {
    if retrieved.is_empty() {
        return Err(ServiceError::EmptyRetrieved);
    }
    Ok(retrieved.intersection(relevant).count() as f64 / retrieved.len() as f64)
}

pub fn recall<T: Ord>(retrieved: &BTreeSet<T>, relevant: &BTreeSet<T>) -> Result<f64> {
    if relevant.is_empty() {
        return Err(ServiceError::EmptyRelevant);
    }
    Ok(retrieved.intersection(relevant).count() as f64 / relevant.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogKind {
    Query,
    Refine,
    Collapse,
}

/// One reader action as written to the query log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub kind: LogKind,
    pub reader_id: String,
    #[serde(default)]
    pub session_id: String,
    #[serde(default)]
    pub snapshot_id: String,
    /// Query text for `query`, facet for `refine`, option for `collapse`.
    pub input: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub status: String,
    /// Facet of the top result, if any.
    #[serde(default)]
    pub top_facet: Option<String>,
    /// Contributions shown to the reader.
    #[serde(default)]
    pub visited: Vec<String>,
}

impl LogEntry {
    pub fn query(reader_id: &str, text: &str) -> Self {
        Self {
            kind: LogKind::Query,
            reader_id: reader_id.to_owned(),
            session_id: String::new(),
            snapshot_id: String::new(),
            input: text.to_owned(),
            tags: crate::formats::query_tags(text),
            status: "ok".to_owned(),
            top_facet: None,
            visited: Vec::new(),
        }
    }
}

pub fn parse_log(text: &str) -> Result<Vec<LogEntry>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(ServiceError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalStats {
    pub users: usize,
    pub queries: usize,
    pub mean_queries_per_user: f64,
    /// Query submissions whose text the reader used only once.
    pub unique_queries: usize,
    /// Query submissions whose text the reader used more than once.
    pub repeated_queries: usize,
    pub mean_unique_per_user: f64,
    pub mean_repeated_per_user: f64,
    /// Distinct facets per reader among refinements and top results.
    pub mean_topics_per_user: f64,
    /// Distinct contributions shown per reader.
    pub mean_visited_per_user: f64,
    /// Distinct query tags per reader.
    pub mean_alternative_words_per_user: f64,
    pub mean_nodes_per_context: Option<f64>,
}

#[derive(Default)]
struct ReaderTally {
    queries: BTreeMap<String, usize>,
    topics: BTreeSet<String>,
    visited: BTreeSet<String>,
    words: BTreeSet<String>,
}

pub fn compute_stats(log: &[LogEntry], mean_nodes_per_context: Option<f64>) -> Result<EvalStats> {
    if log.is_empty() {
        return Err(ServiceError::EmptyLog);
    }
    let mut readers: BTreeMap<&str, ReaderTally> = BTreeMap::new();
    for e in log {
        let t = readers.entry(&e.reader_id).or_default();
        match e.kind {
            LogKind::Query => {
                *t.queries.entry(normalize(&e.input)).or_insert(0) += 1;
                t.words.extend(e.tags.iter().cloned());
            }
            LogKind::Refine => {
                t.topics.insert(e.input.clone());
            }
            LogKind::Collapse => {}
        }
        t.topics.extend(e.top_facet.iter().cloned());
        t.visited.extend(e.visited.iter().cloned());
    }
    let users = readers.len();
    let per_user = |f: &dyn Fn(&ReaderTally) -> usize| -> f64 {
        readers.values().map(f).sum::<usize>() as f64 / users as f64
    };
    let queries: usize = readers
        .values()
        .map(|t| t.queries.values().sum::<usize>())
        .sum();
    let unique: usize = readers
        .values()
        .map(|t| t.queries.values().filter(|&&n| n == 1).count())
        .sum();
    Ok(EvalStats {
        users,
        queries,
        mean_queries_per_user: queries as f64 / users as f64,
        unique_queries: unique,
        repeated_queries: queries - unique,
        mean_unique_per_user: unique as f64 / users as f64,
        mean_repeated_per_user: (queries - unique) as f64 / users as f64,
        mean_topics_per_user: per_user(&|t| t.topics.len()),
        mean_visited_per_user: per_user(&|t| t.visited.len()),
        mean_alternative_words_per_user: per_user(&|t| t.words.len()),
        mean_nodes_per_context,
    })
}

impl EvalStats {
    /// Two-decimal table for the terminal.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rows: [(&str, String); 10] = [
            ("Number of users", self.users.to_string()),
            ("Number of queries", self.queries.to_string()),
            (
                "Avg. # of queries/user",
                format!("{:.2}", self.mean_queries_per_user),
            ),
            (
                "Avg. # of unique queries/user",
                format!("{:.2}", self.mean_unique_per_user),
            ),
            (
                "Avg. # of repeated queries/user",
                format!("{:.2}", self.mean_repeated_per_user),
            ),
            (
                "Avg. # of topic preference/user",
                format!("{:.2}", self.mean_topics_per_user),
            ),
            (
                "Avg. # of visited contributions/user",
                format!("{:.2}", self.mean_visited_per_user),
            ),
            (
                "Avg. # of alternative words/user",
                format!("{:.2}", self.mean_alternative_words_per_user),
            ),
            (
                "Avg. # of nodes/incidence context",
                self.mean_nodes_per_context
                    .map_or_else(|| "n/a".to_owned(), |v| format!("{v:.2}")),
            ),
            (
                "Unique / repeated queries",
                format!("{} / {}", self.unique_queries, self.repeated_queries),
            ),
        ];
        for (name, value) in rows {
            let _ = writeln!(s, "{name:<40}{value}");
        }
        s
    }
}
