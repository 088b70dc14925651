use serde::{Deserialize, Serialize};

use super::taxonomy::TaxonomyIndex;
use super::vector::{cosine, TagVector};
use crate::context::FormalContext;
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

/// Weight of a new observation in the similarity-degree moving average.
pub const DEGREE_LEARNING_RATE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectoryRankScore {
    pub tag: String,
    pub score: f64,
}

/// Connectivity vector of `tag` and aggregate vector of `facet`.
///
/// The connectivity entry for a tag `u` counts the other facets that carry
/// both `tag` and `u`, i.e. the facets sitting below the concept of `tag`
/// alongside `facet`. The aggregate counts the occurrences of each tag
/// under `facet` itself.
pub fn topic_vectors(
    context: &FormalContext,
    facet: &str,
    tag: &str,
    lattice: &ConceptLattice,
) -> Result<(TagVector, TagVector)> {
    if !context.facets().contains(facet) {
        return Err(Error::UnknownFacet(facet.to_owned()));
    }
    let node = lattice
        .tag_node(tag)
        .ok_or_else(|| Error::UnknownTag(tag.to_owned()))?;
    let mut connectivity = TagVector::new();
    for other in &lattice.concepts[node].extent {
        if other == facet {
            continue;
        }
        for u in context.facet_tags(other) {
            connectivity.add(&u, 1.0)?;
        }
    }
    let aggregate: TagVector = context
        .facet_tags(facet)
        .into_iter()
        .map(|u| (u, 1.0))
        .collect();
    Ok((connectivity, aggregate))
}

/// Cosine of the two topic vectors; a zero vector means relevance 0.
pub fn topic_relevance(
    context: &FormalContext,
    facet: &str,
    tag: &str,
    lattice: &ConceptLattice,
) -> Result<f64> {
    let (connectivity, aggregate) = topic_vectors(context, facet, tag, lattice)?;
    match cosine(&connectivity, &aggregate) {
        Ok(v) => Ok(v),
        Err(Error::ZeroVector) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// DirectoryRank of every tag of `facet`, best first.
///
/// A tag scores its topic relevance plus its mean Wu-Palmer similarity to
/// the facet's other tags. Equal scores are ordered by tag.
pub fn directory_rank(
    context: &FormalContext,
    facet: &str,
    lattice: &ConceptLattice,
) -> Result<Vec<DirectoryRankScore>> {
    let tags: Vec<String> = context.facet_tags(facet).into_iter().collect();
    if tags.is_empty() {
        return Err(Error::UnknownFacet(facet.to_owned()));
    }
    let index = TaxonomyIndex::new(lattice);
    let mut nodes = Vec::with_capacity(tags.len());
    let mut relevances = Vec::with_capacity(tags.len());
    for tag in &tags {
        nodes.push(
            lattice
                .tag_node(tag)
                .ok_or_else(|| Error::UnknownTag(tag.clone()))?,
        );
        relevances.push((tag.clone(), topic_relevance(context, facet, tag, lattice)?));
    }
    combine_scores(relevances, |i, j| index.wu_palmer(nodes[i], nodes[j]))
}

/// `DR(t_i) = relevance(t_i) + (1/n) sum_k sim(t_i, t_k)` over the n other
/// tags, sorted best first.
fn combine_scores<F>(
    relevances: Vec<(String, f64)>,
    similarity: F,
) -> Result<Vec<DirectoryRankScore>>
where
    F: Fn(usize, usize) -> Result<f64>,
{
    let others = relevances.len().saturating_sub(1);
    let mut scores = Vec::with_capacity(relevances.len());
    for (i, (tag, relevance)) in relevances.iter().enumerate() {
        let mean_similarity = if others == 0 {
            0.0
        } else {
            let mut sum = 0.0;
            for j in (0..relevances.len()).filter(|&j| j != i) {
                sum += similarity(i, j)?;
            }
            sum / others as f64
        };
        scores.push(DirectoryRankScore {
            tag: tag.clone(),
            score: relevance + mean_similarity,
        });
    }
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.tag.cmp(&b.tag)));
    Ok(scores)
}

/// Moves a similarity degree toward an observed match value.
pub fn update_similarity_degree(old: f64, observed: f64) -> Result<f64> {
    for v in [old, observed] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(v));
        }
    }
    let next = (1.0 - DEGREE_LEARNING_RATE) * old + DEGREE_LEARNING_RATE * observed;
    Ok(next.clamp(0.0, 1.0))
}
