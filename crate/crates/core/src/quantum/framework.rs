use std::sync::Arc;

use serde::Serialize;

use super::algebra::{generate_boolean_algebra, BooleanAlgebra};
use super::projector::{commutes, Projector, SpaceBasis};
use crate::context::Triple;
use crate::error::{Error, Result};

/// A concept read as a proposition about the shared space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptStatement {
    pub id: String,
    pub projector: Projector,
    pub provenance: Vec<Triple>,
}

impl ConceptStatement {
    pub fn new(id: impl Into<String>, projector: Projector) -> Self {
        Self {
            id: id.into(),
            projector,
            provenance: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, provenance: Vec<Triple>) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Commuting elementary statements plus the Boolean algebra they generate.
#[derive(Debug, Clone)]
pub struct Framework {
    basis: Arc<SpaceBasis>,
    elementary: Vec<ConceptStatement>,
    algebra: BooleanAlgebra,
}

impl Framework {
    pub fn new(basis: Arc<SpaceBasis>, elementary: Vec<ConceptStatement>) -> Result<Self> {
        let dim = basis.dimension();
        let generators: Vec<Projector> = elementary.iter().map(|s| s.projector.clone()).collect();
        let algebra = generate_boolean_algebra(dim, &generators)?;
        Ok(Self {
            basis,
            elementary,
            algebra,
        })
    }

    pub fn basis(&self) -> &Arc<SpaceBasis> {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn elementary(&self) -> &[ConceptStatement] {
        &self.elementary
    }

    pub fn algebra(&self) -> &BooleanAlgebra {
        &self.algebra
    }

    pub fn statement(&self, id: &str) -> Option<&ConceptStatement> {
        self.elementary.iter().find(|s| s.id == id)
    }

    fn same_basis(&self, other: &Framework) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || self.basis.labels() == other.basis.labels()
    }
}

impl PartialEq for Framework {
    fn eq(&self, other: &Self) -> bool {
        self.same_basis(other)
            && self.elementary.len() == other.elementary.len()
            && self
                .elementary
                .iter()
                .zip(&other.elementary)
                .all(|(a, b)| a.id == b.id && a.projector.approx_eq(&b.projector))
    }
}

/// A framework together with one statement of its algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Description {
    framework: Framework,
    statement: ConceptStatement,
}

impl Description {
    pub fn new(framework: Framework, statement: ConceptStatement) -> Result<Self> {
        if !framework.algebra.contains(&statement.projector) {
            return Err(Error::NotInAlgebra);
        }
        Ok(Self {
            framework,
            statement,
        })
    }

    pub fn framework(&self) -> &Framework {
        &self.framework
    }

    pub fn statement(&self) -> &ConceptStatement {
        &self.statement
    }
}

fn pair_compatible(a: &Framework, b: &Framework) -> bool {
    a.same_basis(b)
        && a.elementary.iter().all(|p| {
            b.elementary
                .iter()
                .all(|q| commutes(&p.projector, &q.projector).unwrap_or(false))
        })
}

/// Same basis everywhere and every elementary projector of one framework
/// commutes with every elementary projector of each other.
pub fn frameworks_compatible(collection: &[&Framework]) -> bool {
    collection
        .iter()
        .enumerate()
        .all(|(i, a)| collection[i + 1..].iter().all(|b| pair_compatible(a, b)))
}

pub fn smallest_common_framework(collection: &[&Framework]) -> Result<Framework> {
    let first = collection.first().ok_or(Error::EmptyCollection)?;
    if !frameworks_compatible(collection) {
        return Err(Error::IncompatibleFrameworks);
    }
    let mut union: Vec<ConceptStatement> = Vec::new();
    for f in collection {
        for s in &f.elementary {
            if !union.iter().any(|u| u.projector.approx_eq(&s.projector)) {
                union.push(s.clone());
            }
        }
    }
    Framework::new(first.basis.clone(), union)
}

/// Product of commuting projectors, symmetrized at each step.
pub fn projector_product(factors: &[&Projector]) -> Result<Projector> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyCollection)?;
    for (i, p) in factors.iter().enumerate() {
        for q in &factors[i + 1..] {
            if !commutes(p, q)? {
                return Err(Error::IncompatibleStatements);
            }
        }
    }
    let mut acc = (*first).clone();
    for p in rest {
        acc = Projector::from_trusted(acc.matrix() * p.matrix());
    }
    Ok(acc)
}

/// Joint assumption `A = A1 A2 ... Al`.
pub fn assumption_product(assumptions: &[&ConceptStatement]) -> Result<Projector> {
    let factors: Vec<&Projector> = assumptions.iter().map(|s| &s.projector).collect();
    projector_product(&factors)
}

/// `Z` follows from `A` when `ZA = A`, i.e. the range of `A` lies in that of `Z`.
pub fn valid_conclusion(a: &Projector, z: &Projector) -> Result<bool> {
    if !commutes(a, z)? {
        return Err(Error::IncompatibleStatements);
    }
    Ok((z.matrix() * a.matrix() - a.matrix()).norm() <= a.tolerance())
}

/// Replaces a collective description by one over the common framework.
pub fn master_description(descriptions: &[Description]) -> Result<Description> {
    let frameworks: Vec<&Framework> = descriptions.iter().map(|d| &d.framework).collect();
    let framework = smallest_common_framework(&frameworks)?;
    let factors: Vec<&Projector> = descriptions
        .iter()
        .map(|d| &d.statement.projector)
        .collect();
    let projector = projector_product(&factors).map_err(|e| match e {
        Error::IncompatibleStatements => Error::IncompatibleFrameworks,
        other => other,
    })?;
    let id = descriptions
        .iter()
        .map(|d| d.statement.id.as_str())
        .collect::<Vec<_>>()
        .join("&");
    let provenance = descriptions
        .iter()
        .flat_map(|d| d.statement.provenance.iter().cloned())
        .collect();
    let statement = ConceptStatement::new(id, projector).with_provenance(provenance);
    Description::new(framework, statement)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub from: String,
    pub to: String,
    pub compatible: bool,
    /// `None` when the statements do not commute and deduction is undefined.
    pub valid_conclusion: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub links: Vec<ChainLink>,
    pub all_pairs_compatible: bool,
    pub globally_valid: bool,
}

/// Checks each step of `d1 => d2 => ... => dn`.
///
/// Adjacent compatibility is not enough: compatibility is not transitive,
/// so the global flag also requires every non-adjacent pair to be
/// compatible.
pub fn check_reasoning_chain(chain: &[Description]) -> ChainReport {
    let links: Vec<ChainLink> = chain
        .windows(2)
        .map(|w| {
            let compatible = pair_compatible(&w[0].framework, &w[1].framework);
            let deduced = if compatible {
                valid_conclusion(&w[0].statement.projector, &w[1].statement.projector).ok()
            } else {
                None
            };
            ChainLink {
                from: w[0].statement.id.clone(),
                to: w[1].statement.id.clone(),
                compatible,
                valid_conclusion: deduced,
            }
        })
        .collect();
    let frameworks: Vec<&Framework> = chain.iter().map(|d| &d.framework).collect();
    let all_pairs_compatible = frameworks_compatible(&frameworks);
    let globally_valid =
        all_pairs_compatible && links.iter().all(|l| l.valid_conclusion == Some(true));
    ChainReport {
        links,
        all_pairs_compatible,
        globally_valid,
    }
}
