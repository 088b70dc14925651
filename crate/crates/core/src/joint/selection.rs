use std::collections::BTreeSet;

use serde::Serialize;

use super::matching::{statement_query_score, JointMatch};
use super::speaker::FrameworkCollection;
use crate::error::{Error, Result};

/// Rejected frameworks this close to the best score become collapse options.
pub const TIE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameworkScore {
    pub speaker_id: String,
    pub score: f64,
    /// Statement that produced the score.
    pub statement_id: String,
    pub facet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseOption {
    pub id: String,
    pub members: Vec<String>,
    pub representative_facet: String,
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseChoice {
    pub options: Vec<CollapseOption>,
    pub chosen: Option<String>,
    pub excluded: Vec<String>,
}

impl CollapseChoice {
    /// Identifies the choice independently of option order.
    pub fn key(&self) -> String {
        let ids: BTreeSet<&str> = self.options.iter().map(|o| o.id.as_str()).collect();
        ids.into_iter().collect::<Vec<_>>().join("|")
    }

    pub fn option(&self, id: &str) -> Option<&CollapseOption> {
        self.options.iter().find(|o| o.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Chosen(Vec<String>),
    Collapse(CollapseChoice),
}

/// Best statement score of every speaker with a positive score, best first.
///
/// With a facet filter only statements whose extent holds the facet count.
pub fn score_frameworks(
    collection: &FrameworkCollection,
    joint: &JointMatch,
    query: &[String],
    facet: Option<&str>,
) -> Vec<FrameworkScore> {
    let mut scores = Vec::new();
    for member in &collection.members {
        let mut best: Option<FrameworkScore> = None;
        for info in &member.statements {
            if facet.is_some_and(|f| !info.extent.contains(f)) {
                continue;
            }
            let score = statement_query_score(joint, info, query);
            if score > 0.0 && best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(FrameworkScore {
                    speaker_id: member.speaker_id.clone(),
                    score,
                    statement_id: info.id.clone(),
                    facet: info.facet_labels[0].clone(),
                });
            }
        }
        scores.extend(best);
    }
    scores.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.speaker_id.cmp(&b.speaker_id))
    });
    scores
}

fn greedy<'a>(
    collection: &FrameworkCollection,
    seed: &'a str,
    order: &'a [FrameworkScore],
) -> Vec<&'a str> {
    let mut subset = vec![seed];
    for s in order {
        if s.speaker_id == seed {
            continue;
        }
        subset.push(&s.speaker_id);
        if !collection.compatible(&subset) {
            subset.pop();
        }
    }
    subset
}

fn option_label(
    collection: &FrameworkCollection,
    seed: &FrameworkScore,
    others: &[&FrameworkScore],
) -> String {
    let terms = |s: &FrameworkScore| -> BTreeSet<String> {
        collection
            .get(&s.speaker_id)
            .and_then(|m| m.statements.iter().find(|i| i.id == s.statement_id))
            .map(|i| i.terms.clone())
            .unwrap_or_default()
    };
    let mut own = terms(seed);
    for o in others {
        for t in terms(o) {
            own.remove(&t);
        }
    }
    if own.is_empty() {
        format!("{} ({})", seed.facet, seed.speaker_id)
    } else {
        let tags: Vec<String> = own.into_iter().collect();
        format!("{} ({}): {}", seed.facet, seed.speaker_id, tags.join(", "))
    }
}

/// Picks the frameworks a query is answered from.
///
/// Frameworks are taken greedily by score, each kept only if the subset
/// stays compatible. A rejected framework scoring within `TIE_MARGIN` of
/// the best seeds its own greedy subset; if that yields a second subset
/// incompatible with the first the reader must collapse.
pub fn select_from_scores(
    collection: &FrameworkCollection,
    scores: &[FrameworkScore],
) -> Result<Selection> {
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let Some(best) = scores.first() else {
        return Ok(Selection::Chosen(Vec::new()));
    };
    let main = greedy(collection, &best.speaker_id, scores);
    let mut subsets: Vec<(&FrameworkScore, Vec<&str>)> = vec![(best, main)];
    for s in scores {
        if s.score < best.score - TIE_MARGIN {
            break;
        }
        if subsets
            .iter()
            .any(|(_, sub)| sub.contains(&s.speaker_id.as_str()))
        {
            continue;
        }
        let candidate = greedy(collection, &s.speaker_id, scores);
        let conflicts_with_all = subsets.iter().all(|(_, sub)| {
            let mut union: Vec<&str> = sub.clone();
            union.extend(candidate.iter().copied());
            !collection.compatible(&union)
        });
        if conflicts_with_all {
            subsets.push((s, candidate));
        }
    }
    if subsets.len() == 1 {
        let (_, chosen) = subsets.pop().expect("one subset");
        return Ok(Selection::Chosen(
            chosen.into_iter().map(str::to_owned).collect(),
        ));
    }
    let seeds: Vec<&FrameworkScore> = subsets.iter().map(|(s, _)| *s).collect();
    let mut options: Vec<CollapseOption> = subsets
        .iter()
        .map(|(seed, members)| {
            let others: Vec<&FrameworkScore> = seeds
                .iter()
                .copied()
                .filter(|o| o.speaker_id != seed.speaker_id)
                .collect();
            let score = scores
                .iter()
                .filter(|s| members.contains(&s.speaker_id.as_str()))
                .map(|s| s.score)
                .fold(0.0, f64::max);
            let mut members: Vec<String> = members.iter().map(|m| m.to_string()).collect();
            members.sort();
            CollapseOption {
                id: seed.speaker_id.clone(),
                members,
                representative_facet: seed.facet.clone(),
                label: option_label(collection, seed, &others),
                score,
            }
        })
        .collect();
    options.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    Ok(Selection::Collapse(CollapseChoice {
        options,
        chosen: None,
        excluded: Vec::new(),
    }))
}

pub fn select_compatible_subset(
    collection: &FrameworkCollection,
    joint: &JointMatch,
    query: &[String],
) -> Result<Selection> {
    let scores = score_frameworks(collection, joint, query, None);
    select_from_scores(collection, &scores)
}

/// Keeps one option: `"auto"` takes the top score, anything else must be
/// an option id. The others are recorded as excluded.
pub fn collapse(choice: &mut CollapseChoice, selection: &str) -> Result<Vec<String>> {
    let picked = if selection == "auto" {
        choice.options.first()
    } else {
        choice.option(selection)
    }
    .ok_or_else(|| Error::UnknownOption(selection.to_owned()))?
    .clone();
    choice.excluded = choice
        .options
        .iter()
        .filter(|o| o.id != picked.id)
        .map(|o| o.id.clone())
        .collect();
    choice.chosen = Some(picked.id);
    Ok(picked.members)
}
