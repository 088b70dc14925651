//! Brute-force oracles and random fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use facetjoint_core::quantum::Projector;
use facetjoint_core::ranking::LabeledTagGraph;
use facetjoint_core::{FormalConcept, FormalContext};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn random_context<R: Rng>(rng: &mut R, max_facets: usize, max_tags: usize) -> FormalContext {
    let nf = rng.gen_range(1..=max_facets);
    let nt = rng.gen_range(1..=max_tags);
    let density: f64 = rng.gen_range(0.2..0.8);
    let mut ctx = FormalContext::new();
    for f in 0..nf {
        for t in 0..nt {
            if rng.gen_bool(density) {
                ctx.add_triple(&format!("f{f}"), &format!("t{t}"), "i", None)
                    .unwrap();
            }
        }
    }
    if ctx.is_empty() {
        ctx.add_triple("f0", "t0", "i", None).unwrap();
    }
    ctx
}

/// Every concept, found by closing each subset of facets.
pub fn powerset_concepts(ctx: &FormalContext) -> BTreeSet<FormalConcept> {
    let facets: Vec<&String> = ctx.facets().iter().collect();
    let tags_of = |set: &BTreeSet<String>| -> BTreeSet<String> {
        ctx.tags()
            .iter()
            .filter(|t| set.iter().all(|f| ctx.has(f, t)))
            .cloned()
            .collect()
    };
    let facets_of = |set: &BTreeSet<String>| -> BTreeSet<String> {
        ctx.facets()
            .iter()
            .filter(|f| set.iter().all(|t| ctx.has(f, t)))
            .cloned()
            .collect()
    };
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << facets.len()) {
        let subset: BTreeSet<String> = facets
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| (*f).clone())
            .collect();
        let intent = tags_of(&subset);
        let extent = facets_of(&intent);
        out.insert(FormalConcept::new(extent, intent));
    }
    out
}

/// Random directed graph with a subject and up to `max_nodes` labelled nodes
/// drawn from a small label alphabet.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> LabeledTagGraph {
    let mut g = LabeledTagGraph::new();
    let s = g.add_subject("s");
    let n = rng.gen_range(1..=max_nodes);
    let labels = ["a", "b", "c"];
    let nodes: Vec<usize> = (0..n)
        .map(|i| g.add_node(&format!("n{i}"), labels[rng.gen_range(0..labels.len())]))
        .collect();
    for &to in &nodes {
        if rng.gen_bool(0.6) {
            g.add_edge(s, to);
        }
    }
    for &from in &nodes {
        for &to in &nodes {
            if rng.gen_bool(0.3) {
                g.add_edge(from, to);
            }
        }
    }
    g
}

/// Walk distribution by brute force over every node sequence.
pub fn walk_oracle(g: &LabeledTagGraph, max_len: usize, c: f64) -> BTreeMap<Vec<String>, f64> {
    let n = g.node_count();
    let s = g.subject().unwrap();
    let mut out: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for len in 1..=max_len {
        let total = n.pow(len as u32);
        for code in 0..total {
            let mut seq = Vec::with_capacity(len);
            let mut x = code;
            for _ in 0..len {
                seq.push(x % n);
                x /= n;
            }
            let mut p = 1.0;
            let mut prev = s;
            let mut ok = true;
            for &v in &seq {
                let succ = g.successors(prev);
                let multiplicity = succ.iter().filter(|&&w| w == v).count();
                if multiplicity == 0 {
                    ok = false;
                    break;
                }
                p *= c * multiplicity as f64 / succ.len() as f64;
                prev = v;
            }
            if !ok {
                continue;
            }
            let last = *seq.last().unwrap();
            p *= if g.successors(last).is_empty() {
                1.0
            } else {
                1.0 - c
            };
            let labels: Vec<String> = seq.iter().map(|&v| g.label(v).to_owned()).collect();
            *out.entry(labels).or_insert(0.0) += p;
        }
    }
    out
}

/// Random orthogonal matrix from the QR factorization of a Gaussian-ish one.
pub fn random_orthogonal<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

pub fn projector_on_columns(q: &DMatrix<f64>, pattern: &[bool]) -> Projector {
    let dim = q.nrows();
    let mut m = DMatrix::zeros(dim, dim);
    for (j, &on) in pattern.iter().enumerate() {
        if on {
            let col = q.column(j);
            m += col * col.transpose();
        }
    }
    Projector::new((&m + m.transpose()) * 0.5).unwrap()
}

/// Column space of `a` lies in that of `z`: every column of `a` is fitted by
/// least squares on a basis of `z` with a negligible residual.
pub fn range_contained(a: &DMatrix<f64>, z: &DMatrix<f64>) -> bool {
    let z_basis = range_basis(z);
    let a_basis = range_basis(a);
    if a_basis.ncols() == 0 {
        return true;
    }
    if z_basis.ncols() == 0 {
        return false;
    }
    let svd = z_basis.clone().svd(true, true);
    a_basis.column_iter().all(|col| {
        let col: DVector<f64> = col.into_owned();
        let x = svd.solve(&col, 1e-12).unwrap();
        (&z_basis * x - col).norm() < 1e-6
    })
}

/// Left singular vectors with a nonzero singular value, mixed by a fixed
/// invertible matrix so the basis is not orthonormal.
fn range_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.5)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let k = cols.len();
    let basis = DMatrix::from_columns(&cols);
    let mix = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            2.0
        } else if j > i {
            0.5
        } else {
            0.0
        }
    });
    basis * mix
}
