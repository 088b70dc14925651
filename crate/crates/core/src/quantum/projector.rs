use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance, scaled by the dimension where a norm is compared.
pub const TOLERANCE: f64 = 1e-9;

/// Named axes of the shared finite-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceBasis {
    labels: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl SpaceBasis {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn axis(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Indicator vector of one axis.
    pub fn unit(&self, axis: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dimension());
        v[axis] = 1.0;
        v
    }
}

/// Orthogonal projector: a real symmetric idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(DMatrix<f64>);

impl Serialize for Projector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self
            .0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(s)
    }
}

impl Projector {
    /// Validates symmetry and idempotence within tolerance.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let p = Projector(matrix);
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::NotAProjector)
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self::new(m)
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn zero(dimension: usize) -> Self {
        Projector(DMatrix::zeros(dimension, dimension))
    }

    pub fn identity(dimension: usize) -> Self {
        Projector(DMatrix::identity(dimension, dimension))
    }

    /// Projector onto a single direction.
    pub fn onto(direction: &DVector<f64>) -> Result<Self> {
        let norm = direction.norm();
        if norm <= TOLERANCE {
            return Ok(Self::zero(direction.len()));
        }
        let u = direction / norm;
        Ok(Projector(&u * u.transpose()))
    }

    pub(crate) fn from_trusted(matrix: DMatrix<f64>) -> Self {
        let symmetric = (&matrix + matrix.transpose()) * 0.5;
        let p = Projector(symmetric);
        debug_assert!(p.is_valid(), "operation produced a non-projector");
        p
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn tolerance(&self) -> f64 {
        TOLERANCE * self.dimension().max(1) as f64
    }

    pub fn is_symmetric(&self) -> bool {
        (&self.0 - self.0.transpose()).amax() <= TOLERANCE
    }

    pub fn is_idempotent(&self) -> bool {
        (&self.0 * &self.0 - &self.0).norm() <= self.tolerance()
    }

    pub fn is_valid(&self) -> bool {
        self.is_symmetric() && self.is_idempotent()
    }

    /// Dimension of the range (the trace of a projector).
    pub fn rank(&self) -> usize {
        self.0.trace().round().max(0.0) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.0.norm() <= self.tolerance()
    }

    /// Frobenius-norm equality within the dimension-scaled tolerance.
    pub fn approx_eq(&self, other: &Projector) -> bool {
        self.dimension() == other.dimension() && (&self.0 - &other.0).norm() <= self.tolerance()
    }

    fn same_dimension(&self, other: &Projector) -> Result<()> {
        if self.dimension() == other.dimension() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            })
        }
    }
}

/// Projector onto the span of the chosen axes and the extra weight vectors.
///
/// Inputs are orthonormalized with modified Gram-Schmidt (applied twice);
/// vectors whose residual falls below the rank cutoff are dropped. No
/// inputs at all yields the zero operator.
pub fn projector_from_extent(
    basis: &SpaceBasis,
    member_axes: &[usize],
    weights: &[DVector<f64>],
) -> Result<Projector> {
    let dim = basis.dimension();
    let mut inputs = Vec::with_capacity(member_axes.len() + weights.len());
    for &axis in member_axes {
        if axis >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: axis + 1,
            });
        }
        inputs.push(basis.unit(axis));
    }
    for w in weights {
        if w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: w.len(),
            });
        }
        inputs.push(w.clone());
    }
    let mut frame: Vec<DVector<f64>> = Vec::new();
    for v in inputs {
        let norm = v.norm();
        if norm <= TOLERANCE {
            continue;
        }
        let mut r = v / norm;
        for _ in 0..2 {
            for q in &frame {
                let c = q.dot(&r);
                r -= q * c;
            }
        }
        let residual = r.norm();
        if residual > TOLERANCE {
            frame.push(r / residual);
        }
    }
    let mut m = DMatrix::zeros(dim, dim);
    for q in &frame {
        m += q * q.transpose();
    }
    Ok(Projector::from_trusted(m))
}

/// Orthogonal complement `I - P`.
pub fn negate(p: &Projector) -> Projector {
    Projector::from_trusted(DMatrix::identity(p.dimension(), p.dimension()) - &p.0)
}

/// Frobenius norm of the commutator `PQ - QP`.
pub fn commutator_norm(p: &Projector, q: &Projector) -> Result<f64> {
    p.same_dimension(q)?;
    Ok((&p.0 * &q.0 - &q.0 * &p.0).norm())
}

pub fn commutes(p: &Projector, q: &Projector) -> Result<bool> {
    Ok(commutator_norm(p, q)? <= p.tolerance())
}

/// `p and q` as the product `PQ`; meaningless when they do not commute.
pub fn conjoin(p: &Projector, q: &Projector) -> Result<Projector> {
    if !commutes(p, q)? {
        return Err(Error::IncompatibleStatements);
    }
    Ok(Projector::from_trusted(&p.0 * &q.0))
}

pub fn meet(p: &Projector, q: &Projector) -> Result<Projector> {
    conjoin(p, q)
}

/// `P + Q - PQ` for commuting projectors.
pub fn join(p: &Projector, q: &Projector) -> Result<Projector> {
    let pq = conjoin(p, q)?;
    Ok(Projector::from_trusted(&p.0 + &q.0 - pq.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize) -> SpaceBasis {
        SpaceBasis::new((0..n).map(|i| format!("axis{i}"))).unwrap()
    }

    fn half() -> Projector {
        Projector::from_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
    }

    #[test]
    fn basis_rejects_duplicates() {
        assert!(matches!(
            SpaceBasis::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        let b = SpaceBasis::new(["x", "y"]).unwrap();
        assert_eq!(b.axis("y"), Some(1));
        assert_eq!(b.dimension(), 2);
    }

    #[test]
    fn construction_examples() {
        let b = basis(2);
        let p = projector_from_extent(&b, &[0], &[]).unwrap();
        assert!(p.approx_eq(&Projector::diagonal(&[1.0, 0.0]).unwrap()));
        let w = projector_from_extent(&b, &[], &[DVector::from_vec(vec![1.0, 1.0])]).unwrap();
        assert!(w.approx_eq(&half()));
        let all = projector_from_extent(&b, &[0, 1], &[]).unwrap();
        assert!(all.approx_eq(&Projector::identity(2)));
        let none = projector_from_extent(&b, &[], &[]).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn construction_drops_dependent_vectors() {
        let b = basis(3);
        let p = projector_from_extent(
            &b,
            &[0],
            &[
                DVector::from_vec(vec![1.0, 1.0, 0.0]),
                DVector::from_vec(vec![2.0, 2.0, 0.0]),
            ],
        )
        .unwrap();
        assert_eq!(p.rank(), 2);
        assert!(p.approx_eq(&Projector::diagonal(&[1.0, 1.0, 0.0]).unwrap()));
    }

    #[test]
    fn construction_dimension_errors() {
        let b = basis(2);
        assert!(matches!(
            projector_from_extent(&b, &[2], &[]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            projector_from_extent(&b, &[], &[DVector::from_vec(vec![1.0; 3])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_projectors() {
        assert_eq!(
            Projector::from_rows(&[&[1.0, 1.0], &[0.0, 0.0]]),
            Err(Error::NotAProjector)
        );
        assert_eq!(Projector::diagonal(&[2.0]), Err(Error::NotAProjector));
    }

    #[test]
    fn negation() {
        assert!(negate(&Projector::identity(3)).is_zero());
        assert!(negate(&Projector::zero(3)).approx_eq(&Projector::identity(3)));
        let p = Projector::diagonal(&[1.0, 0.0]).unwrap();
        assert!(negate(&p).approx_eq(&Projector::diagonal(&[0.0, 1.0]).unwrap()));
        assert!(negate(&negate(&half())).approx_eq(&half()));
    }

    #[test]
    fn commutation() {
        let p = Projector::diagonal(&[1.0, 0.0]).unwrap();
        assert!(commutes(&half(), &half()).unwrap());
        let d = Projector::diagonal(&[0.0, 1.0]).unwrap();
        assert!(commutes(&p, &d).unwrap());
        assert!(!commutes(&p, &half()).unwrap());
        let norm = commutator_norm(&p, &half()).unwrap();
        assert!((norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(
            commutes(&p, &Projector::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conjunction() {
        let p = Projector::diagonal(&[1.0, 0.0]).unwrap();
        assert!(conjoin(&p, &Projector::identity(2)).unwrap().approx_eq(&p));
        let a = Projector::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let b = Projector::diagonal(&[0.0, 1.0, 0.0]).unwrap();
        assert!(conjoin(&a, &b).unwrap().is_zero());
        assert_eq!(conjoin(&p, &half()), Err(Error::IncompatibleStatements));
    }

    #[test]
    fn meet_and_join() {
        let a = Projector::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let b = Projector::diagonal(&[0.0, 1.0, 0.0]).unwrap();
        assert!(join(&a, &a).unwrap().approx_eq(&a));
        assert!(join(&a, &b)
            .unwrap()
            .approx_eq(&Projector::diagonal(&[1.0, 1.0, 0.0]).unwrap()));
        assert!(meet(&half(), &negate(&half())).unwrap().is_zero());
        assert_eq!(
            join(&Projector::diagonal(&[1.0, 0.0]).unwrap(), &half()),
            Err(Error::IncompatibleStatements)
        );
    }
}
