use nalgebra::DMatrix;

use super::projector::{commutes, negate, Projector};
use crate::error::{Error, Result};

/// Largest number of atoms an algebra may have.
pub const MAX_ATOMS: usize = 20;

/// Boolean algebra of commuting projectors, stored by its atoms.
///
/// Atoms are mutually orthogonal, nonzero and sum to the identity. Every
/// element is the sum of a subset of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanAlgebra {
    dimension: usize,
    atoms: Vec<Projector>,
}

impl BooleanAlgebra {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Projector] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn element_count(&self) -> u64 {
        1u64 << self.atoms.len()
    }

    /// Sum of the atoms selected by the bits of `mask`.
    pub fn element(&self, mask: u64) -> Projector {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for (i, atom) in self.atoms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m += atom.matrix();
            }
        }
        Projector::from_trusted(m)
    }

    pub fn elements(&self) -> impl Iterator<Item = Projector> + '_ {
        (0..self.element_count()).map(|mask| self.element(mask))
    }

    /// Atom mask of `p` when it belongs to the algebra.
    pub fn decompose(&self, p: &Projector) -> Option<u64> {
        if p.dimension() != self.dimension {
            return None;
        }
        let mut mask = 0u64;
        for (i, atom) in self.atoms.iter().enumerate() {
            let pa = p.matrix() * atom.matrix();
            if (pa - atom.matrix()).norm() <= p.tolerance() {
                mask |= 1 << i;
            }
        }
        self.element(mask).approx_eq(p).then_some(mask)
    }

    pub fn contains(&self, p: &Projector) -> bool {
        self.decompose(p).is_some()
    }
}

/// Smallest Boolean algebra containing the given commuting projectors.
///
/// Atoms are found by repeatedly splitting each current atom `A` into `AP`
/// and `A(I - P)` for every generator `P`, discarding zero parts.
pub fn generate_boolean_algebra(
    dimension: usize,
    generators: &[Projector],
) -> Result<BooleanAlgebra> {
    for g in generators {
        if g.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: g.dimension(),
            });
        }
    }
    for (i, p) in generators.iter().enumerate() {
        for q in &generators[i + 1..] {
            if !commutes(p, q)? {
                return Err(Error::IncompatibleStatements);
            }
        }
    }
    let mut atoms = vec![Projector::identity(dimension)];
    if dimension == 0 {
        atoms.clear();
    }
    for g in generators {
        let complement = negate(g);
        let mut next = Vec::with_capacity(atoms.len() * 2);
        for atom in &atoms {
            for part in [g, &complement] {
                let piece = Projector::from_trusted(atom.matrix() * part.matrix());
                if !piece.is_zero() {
                    next.push(piece);
                }
            }
        }
        if next.len() > MAX_ATOMS {
            return Err(Error::AlgebraTooLarge(next.len()));
        }
        atoms = next;
    }
    Ok(BooleanAlgebra { dimension, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::projector::{join, meet};

    fn diag(d: &[f64]) -> Projector {
        Projector::diagonal(d).unwrap()
    }

    #[test]
    fn two_diagonal_generators() {
        let b =
            generate_boolean_algebra(3, &[diag(&[1.0, 0.0, 0.0]), diag(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(b.atom_count(), 3);
        assert_eq!(b.element_count(), 8);
        let elems: Vec<Projector> = b.elements().collect();
        // closure oracle: meets, joins and complements of the 8 stay inside
        for p in &elems {
            assert!(b.contains(&negate(p)));
            for q in &elems {
                assert!(b.contains(&meet(p, q).unwrap()));
                assert!(b.contains(&join(p, q).unwrap()));
            }
        }
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                assert!(!elems[i].approx_eq(&elems[j]));
            }
        }
    }

    #[test]
    fn identity_and_empty_generators() {
        let b = generate_boolean_algebra(2, &[Projector::identity(2)]).unwrap();
        assert_eq!(b.atom_count(), 1);
        assert_eq!(b.element_count(), 2);
        assert!(b.contains(&Projector::zero(2)));
        assert!(b.contains(&Projector::identity(2)));
        let empty = generate_boolean_algebra(2, &[]).unwrap();
        assert_eq!(empty.element_count(), 2);
        assert!(!empty.contains(&diag(&[1.0, 0.0])));
    }

    #[test]
    fn atoms_partition_identity() {
        let b = generate_boolean_algebra(
            4,
            &[diag(&[1.0, 1.0, 0.0, 0.0]), diag(&[0.0, 1.0, 1.0, 0.0])],
        )
        .unwrap();
        assert_eq!(b.atom_count(), 4);
        let mut sum = DMatrix::zeros(4, 4);
        for (i, a) in b.atoms().iter().enumerate() {
            sum += a.matrix();
            for c in &b.atoms()[i + 1..] {
                assert!((a.matrix() * c.matrix()).norm() < 1e-9);
            }
        }
        assert!((sum - DMatrix::<f64>::identity(4, 4)).norm() < 1e-9);
    }

    #[test]
    fn rejects_non_commuting_generators() {
        let half = Projector::from_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert_eq!(
            generate_boolean_algebra(2, &[diag(&[1.0, 0.0]), half]),
            Err(Error::IncompatibleStatements)
        );
    }

    #[test]
    fn guards_against_too_many_atoms() {
        let n = 22;
        let gens: Vec<Projector> = (0..n)
            .map(|i| {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                diag(&d)
            })
            .collect();
        assert!(matches!(
            generate_boolean_algebra(n, &gens),
            Err(Error::AlgebraTooLarge(_))
        ));
    }
}
