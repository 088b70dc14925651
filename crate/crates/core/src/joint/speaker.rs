use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DVector;

use crate::context::FormalContext;
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;
use crate::quantum::{
    frameworks_compatible, projector_from_extent, ConceptStatement, Framework, SpaceBasis,
};

/// Lattice node behind one elementary statement of a speaker.
#[derive(Debug, Clone, PartialEq)]
pub struct StatementInfo {
    pub id: String,
    pub node: usize,
    /// Facets whose reduced label sits on the node.
    pub facet_labels: Vec<String>,
    pub extent: BTreeSet<String>,
    /// Intent tags plus the facet labels; what a query term is matched against.
    pub terms: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct SpeakerLattice {
    pub speaker_id: String,
    pub context: FormalContext,
    pub lattice: ConceptLattice,
    pub framework: Framework,
    /// Parallel to `framework.elementary()`.
    pub statements: Vec<StatementInfo>,
}

impl SpeakerLattice {
    /// Statement of the concept labelled by `facet`.
    pub fn facet_statement(&self, facet: &str) -> Option<usize> {
        let node = self.lattice.facet_node(facet)?;
        self.statements.iter().position(|s| s.node == node)
    }
}

#[derive(Debug, Clone)]
pub struct FrameworkCollection {
    pub basis: Arc<SpaceBasis>,
    pub members: Vec<SpeakerLattice>,
}

impl FrameworkCollection {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, speaker: &str) -> Option<&SpeakerLattice> {
        self.members.iter().find(|m| m.speaker_id == speaker)
    }

    /// Compatibility of the frameworks of the named speakers.
    pub fn compatible(&self, speakers: &[&str]) -> bool {
        let frameworks: Vec<&Framework> = speakers
            .iter()
            .filter_map(|s| self.get(s))
            .map(|m| &m.framework)
            .collect();
        frameworks_compatible(&frameworks)
    }
}

/// One axis per distinct elementary context across all speakers, sorted.
pub fn corpus_basis(speakers: &BTreeMap<String, FormalContext>) -> Result<SpaceBasis> {
    let axes: BTreeSet<String> = speakers
        .values()
        .flat_map(|ctx| ctx.triples().map(|t| t.elementary_context()))
        .collect();
    SpaceBasis::new(axes)
}

/// Occurrence vector of one facet: the sum of its elementary-context axes.
fn occurrence_vector(
    basis: &SpaceBasis,
    context: &FormalContext,
    facet: &str,
) -> Result<DVector<f64>> {
    let mut v = DVector::zeros(basis.dimension());
    for tag in context.facet_tags(facet) {
        let triple = context
            .triple(facet, &tag)
            .ok_or_else(|| Error::UnknownTag(tag.clone()))?;
        let label = triple.elementary_context();
        let axis = basis.axis(&label).ok_or(Error::UnknownAxis(label))?;
        v[axis] = 1.0;
    }
    Ok(v)
}

fn build_speaker(
    speaker_id: &str,
    context: &FormalContext,
    basis: &Arc<SpaceBasis>,
) -> Result<SpeakerLattice> {
    let lattice = ConceptLattice::build(context.enumerate_concepts())?;
    let mut vectors = BTreeMap::new();
    for facet in context.facets() {
        vectors.insert(facet.clone(), occurrence_vector(basis, context, facet)?);
    }
    let mut statements = Vec::new();
    let mut infos = Vec::new();
    for (node, concept) in lattice.concepts.iter().enumerate() {
        let facet_labels: Vec<String> = lattice.facets_at(node).cloned().collect();
        let Some(first) = facet_labels.first() else {
            continue;
        };
        let id = format!("{speaker_id}/{first}");
        let weights: Vec<DVector<f64>> =
            concept.extent.iter().map(|f| vectors[f].clone()).collect();
        let projector = projector_from_extent(basis, &[], &weights)?;
        let provenance = concept
            .extent
            .iter()
            .flat_map(|f| {
                context
                    .facet_tags(f)
                    .into_iter()
                    .filter_map(move |t| context.triple(f, &t))
            })
            .collect();
        statements.push(ConceptStatement::new(id.clone(), projector).with_provenance(provenance));
        let mut terms = concept.intent.clone();
        terms.extend(facet_labels.iter().cloned());
        infos.push(StatementInfo {
            id,
            node,
            facet_labels,
            extent: concept.extent.clone(),
            terms,
        });
    }
    let framework = Framework::new(basis.clone(), statements)?;
    Ok(SpeakerLattice {
        speaker_id: speaker_id.to_owned(),
        context: context.clone(),
        lattice,
        framework,
        statements: infos,
    })
}

/// Per speaker: context, concept lattice and the framework of its facet
/// concepts, each projecting onto the occurrence vectors of its extent.
pub fn build_speaker_frameworks(
    speakers: &BTreeMap<String, FormalContext>,
    basis: Arc<SpaceBasis>,
) -> Result<FrameworkCollection> {
    let members = speakers
        .iter()
        .map(|(id, ctx)| build_speaker(id, ctx, &basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameworkCollection { basis, members })
}
