//! Contributions, taxonomy and judgments files, and query tokenization.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use facetjoint_core::joint::{load_ontology, Contribution, Ontology};
use facetjoint_core::label::normalize;

use crate::error::{Result, ServiceError};

/// Words dropped from reader queries.
pub const STOP_WORDS: [&str; 8] = ["a", "an", "the", "i", "im", "for", "of", "to"];

/// The taxonomy bundled with the binary.
pub const DEFAULT_TAXONOMY: &str = include_str!("../fixtures/taxonomy.tsv");

fn parse_error(line: usize, message: impl Into<String>) -> ServiceError {
    ServiceError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a contributions file.
///
/// Fields: speaker, facet, tag, incidence, then an optional RFC 3339
/// timestamp and an optional body. Timestamps that are present must not
/// decrease. Ids are `c1`, `c2`, ... in line order.
pub fn parse_contributions(text: &str) -> Result<Vec<Contribution>> {
    let mut out = Vec::new();
    let mut last: Option<DateTime<Utc>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(4..=6).contains(&fields.len()) {
            return Err(parse_error(
                line_no,
                format!(
                    "expected 4 to 6 tab-separated fields, found {}",
                    fields.len()
                ),
            ));
        }
        let timestamp = match fields.get(4).map(|s| s.trim()) {
            None | Some("") => None,
            Some(ts) => {
                let parsed = DateTime::parse_from_rfc3339(ts)
                    .map_err(|e| parse_error(line_no, format!("bad timestamp `{ts}`: {e}")))?
                    .with_timezone(&Utc);
                if last.is_some_and(|prev| parsed < prev) {
                    return Err(parse_error(
                        line_no,
                        "timestamp earlier than the previous one",
                    ));
                }
                last = Some(parsed);
                Some(parsed)
            }
        };
        let body = fields
            .get(5)
            .map(|b| b.trim())
            .filter(|b| !b.is_empty())
            .map(str::to_owned);
        let id = format!("c{}", out.len() + 1);
        let c = Contribution::new(
            id, fields[0], fields[1], fields[2], fields[3], timestamp, body,
        )
        .map_err(|e| parse_error(line_no, e.to_string()))?;
        out.push(c);
    }
    if out.is_empty() {
        return Err(ServiceError::EmptyCorpus);
    }
    Ok(out)
}

/// Parses a taxonomy file of `child<TAB>parent` lines.
pub fn parse_taxonomy(text: &str) -> Result<Ontology> {
    load_ontology(text).map_err(|e| match e {
        facetjoint_core::Error::Parse { line, message } => ServiceError::Parse { line, message },
        other => other.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Judgment {
    pub query: String,
    pub relevant: BTreeSet<String>,
}

/// Parses `query<TAB>c1,c2,...` lines.
pub fn parse_judgments(text: &str) -> Result<Vec<Judgment>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((query, ids)) = line.split_once('\t') else {
            return Err(parse_error(i + 1, "expected query<TAB>ids"));
        };
        let relevant: BTreeSet<String> = ids
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        out.push(Judgment {
            query: query.trim().to_owned(),
            relevant,
        });
    }
    Ok(out)
}

/// Query text to query tags: whitespace split, normalized, punctuation
/// other than `-` removed, stop words dropped.
pub fn query_tags(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            normalize(w)
                .chars()
                .filter(|c| c.is_alphanumeric() || *c == '-')
                .collect::<String>()
        })
        .filter(|w| !w.is_empty() && !STOP_WORDS.contains(&w.as_str()))
        .collect()
}
