use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse non-negative weights over tags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TagVector {
    entries: BTreeMap<String, f64>,
}

impl TagVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `amount` to the entry of `tag`. Negative weights are rejected.
    pub fn add(&mut self, tag: &str, amount: f64) -> Result<()> {
        if amount.is_nan() || amount < 0.0 {
            return Err(Error::OutOfRange(amount));
        }
        *self.entries.entry(tag.to_owned()).or_insert(0.0) += amount;
        Ok(())
    }

    pub fn get(&self, tag: &str) -> f64 {
        self.entries.get(tag).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn dot(&self, other: &TagVector) -> f64 {
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .map(|(tag, w)| w * large.get(tag))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl<S: AsRef<str>> FromIterator<(S, f64)> for TagVector {
    /// Collects `(tag, weight)` pairs; negative weights are clamped to zero.
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        let mut v = TagVector::new();
        for (tag, w) in iter {
            let _ = v.add(tag.as_ref(), w.max(0.0));
        }
        v
    }
}

/// Normalized inner product of two tag vectors.
pub fn cosine(v1: &TagVector, v2: &TagVector) -> Result<f64> {
    let n1 = v1.norm();
    let n2 = v2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((v1.dot(v2) / (n1 * n2)).clamp(0.0, 1.0))
}
