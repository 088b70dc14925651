use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

/// A rooted DAG whose edges point from a node to its parents.
pub trait Hierarchy {
    fn node_count(&self) -> usize;
    fn root(&self) -> usize;
    fn parents(&self, node: usize) -> &[usize];
    /// Identifier used in errors and for lexicographic tie-breaking.
    fn node_id(&self, node: usize) -> String;
}

impl Hierarchy for ConceptLattice {
    fn node_count(&self) -> usize {
        self.len()
    }

    fn root(&self) -> usize {
        self.top
    }

    fn parents(&self, node: usize) -> &[usize] {
        self.upper_covers(node)
    }

    fn node_id(&self, node: usize) -> String {
        format!("{node:06}")
    }
}

/// Depths and ancestor sets of a hierarchy, computed once.
///
/// Depth counts the nodes on the longest root-to-node path, so the root has
/// depth 1 and every proper descendant is strictly deeper than its
/// ancestors. On trees this is the ordinary path length.
pub struct TaxonomyIndex<'h, H: Hierarchy + ?Sized> {
    hierarchy: &'h H,
    depths: Vec<usize>,
    ancestors: Vec<FixedBitSet>,
}

impl<'h, H: Hierarchy + ?Sized> TaxonomyIndex<'h, H> {
    pub fn new(hierarchy: &'h H) -> Self {
        let n = hierarchy.node_count();
        let mut depths = vec![0usize; n];
        let mut ancestors = vec![FixedBitSet::with_capacity(n); n];
        let mut done = vec![false; n];
        for start in 0..n {
            // iterative post-order so deep taxonomies don't overflow the stack
            let mut stack = vec![(start, false)];
            while let Some((node, expanded)) = stack.pop() {
                if done[node] {
                    continue;
                }
                let parents = hierarchy.parents(node);
                if expanded || parents.iter().all(|&p| done[p]) {
                    let mut anc = FixedBitSet::with_capacity(n);
                    anc.insert(node);
                    let mut d = 0;
                    for &p in parents {
                        if done[p] {
                            anc.union_with(&ancestors[p]);
                            d = d.max(depths[p]);
                        }
                    }
                    depths[node] = d + 1;
                    ancestors[node] = anc;
                    done[node] = true;
                } else {
                    stack.push((node, true));
                    for &p in parents {
                        if !done[p] {
                            stack.push((p, false));
                        }
                    }
                }
            }
        }
        Self {
            hierarchy,
            depths,
            ancestors,
        }
    }

    fn check(&self, node: usize) -> Result<()> {
        if node < self.depths.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(node.to_string()))
        }
    }

    pub fn depth(&self, node: usize) -> Result<usize> {
        self.check(node)?;
        Ok(self.depths[node])
    }

    /// Deepest common ancestor; ties go to the lexicographically smallest id.
    pub fn lcs(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        let mut common = self.ancestors[a].clone();
        common.intersect_with(&self.ancestors[b]);
        common
            .ones()
            .map(|n| (self.depths[n], n))
            .max_by(|x, y| {
                x.0.cmp(&y.0).then_with(|| {
                    self.hierarchy
                        .node_id(y.1)
                        .cmp(&self.hierarchy.node_id(x.1))
                })
            })
            .map(|(_, n)| n)
            .ok_or_else(|| Error::UnknownNode(self.hierarchy.node_id(a)))
    }

    /// Wu-Palmer similarity `2 depth(lcs) / (depth(a) + depth(b))`.
    pub fn wu_palmer(&self, a: usize, b: usize) -> Result<f64> {
        let l = self.lcs(a, b)?;
        Ok(2.0 * self.depths[l] as f64 / (self.depths[a] + self.depths[b]) as f64)
    }
}

pub fn depth<H: Hierarchy + ?Sized>(hierarchy: &H, node: usize) -> Result<usize> {
    TaxonomyIndex::new(hierarchy).depth(node)
}

pub fn lcs<H: Hierarchy + ?Sized>(hierarchy: &H, a: usize, b: usize) -> Result<usize> {
    TaxonomyIndex::new(hierarchy).lcs(a, b)
}

pub fn wu_palmer_nodes<H: Hierarchy + ?Sized>(hierarchy: &H, a: usize, b: usize) -> Result<f64> {
    TaxonomyIndex::new(hierarchy).wu_palmer(a, b)
}

/// Wu-Palmer similarity of two tags through the nodes carrying their labels.
pub fn wu_palmer(lattice: &ConceptLattice, t1: &str, t2: &str) -> Result<f64> {
    let a = lattice
        .tag_node(t1)
        .ok_or_else(|| Error::UnknownTag(t1.to_owned()))?;
    let b = lattice
        .tag_node(t2)
        .ok_or_else(|| Error::UnknownTag(t2.to_owned()))?;
    wu_palmer_nodes(lattice, a, b)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::context::FormalContext;

    /// Small hand-built DAG; node 0 is the root.
    pub(crate) struct Dag {
        pub names: Vec<&'static str>,
        pub parents: Vec<Vec<usize>>,
    }

    impl Hierarchy for Dag {
        fn node_count(&self) -> usize {
            self.names.len()
        }
        fn root(&self) -> usize {
            0
        }
        fn parents(&self, node: usize) -> &[usize] {
            &self.parents[node]
        }
        fn node_id(&self, node: usize) -> String {
            self.names[node].to_owned()
        }
    }

    /// top -> a -> {b, c}
    pub(crate) fn four_nodes() -> Dag {
        Dag {
            names: vec!["top", "a", "b", "c"],
            parents: vec![vec![], vec![0], vec![1], vec![1]],
        }
    }

    #[test]
    fn depths() {
        let chain = Dag {
            names: vec!["top", "a", "b"],
            parents: vec![vec![], vec![0], vec![1]],
        };
        assert_eq!(depth(&chain, 0).unwrap(), 1);
        assert_eq!(depth(&chain, 2).unwrap(), 3);
        let diamond = Dag {
            names: vec!["top", "a", "b", "bottom"],
            parents: vec![vec![], vec![0], vec![0], vec![1, 2]],
        };
        assert_eq!(depth(&diamond, 3).unwrap(), 3);
        assert!(matches!(depth(&diamond, 7), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn least_common_subsumer() {
        let dag = four_nodes();
        assert_eq!(lcs(&dag, 2, 2).unwrap(), 2);
        assert_eq!(lcs(&dag, 2, 3).unwrap(), 1);
        assert_eq!(lcs(&dag, 1, 3).unwrap(), 1);
    }

    #[test]
    fn lcs_ties_break_lexicographically() {
        // two incomparable common parents at equal depth
        let dag = Dag {
            names: vec!["root", "q", "p", "x", "y"],
            parents: vec![vec![], vec![0], vec![0], vec![1, 2], vec![1, 2]],
        };
        assert_eq!(lcs(&dag, 3, 4).unwrap(), 2);
    }

    #[test]
    fn four_node_similarities() {
        let dag = four_nodes();
        assert_eq!(wu_palmer_nodes(&dag, 2, 2).unwrap(), 1.0);
        assert!((wu_palmer_nodes(&dag, 2, 3).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((wu_palmer_nodes(&dag, 1, 2).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn tags_in_a_lattice() {
        let mut ctx = FormalContext::new();
        ctx.add_triple("f1", "t1", "i", None).unwrap();
        ctx.add_triple("f1", "t2", "i", None).unwrap();
        ctx.add_triple("f2", "t1", "i", None).unwrap();
        let lattice = ConceptLattice::build(ctx.enumerate_concepts()).unwrap();
        // t1 on top (depth 1), t2 on bottom (depth 2)
        assert!((wu_palmer(&lattice, "t1", "t2").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(wu_palmer(&lattice, "t2", "t2").unwrap(), 1.0);
        assert_eq!(
            wu_palmer(&lattice, "t1", "zz"),
            Err(Error::UnknownTag("zz".into()))
        );
    }
}
