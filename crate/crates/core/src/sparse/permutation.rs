use serde::{Deserialize, Serialize};

use super::SparseError;

/// Bijection on `[0, n)`. Stored as the new-to-old map together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Permutation {
    /// `new_to_old[k]` is the original index placed at position `k`.
    pub fn new(new_to_old: Vec<usize>) -> Result<Self, SparseError> {
        let n = new_to_old.len();
        let mut inv = vec![usize::MAX; n];
        for (k, &old) in new_to_old.iter().enumerate() {
            if old >= n || inv[old] != usize::MAX {
                return Err(SparseError::InvalidPermutation);
            }
            inv[old] = k;
        }
        Ok(Self {
            perm: new_to_old,
            inv,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            inv: (0..n).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    pub fn new_to_old(&self, k: usize) -> usize {
        self.perm[k]
    }

    pub fn old_to_new(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            perm: self.inv.clone(),
            inv: self.perm.clone(),
        }
    }

    /// Applies `self` first, then `other`: position `k` of the result holds
    /// `self.new_to_old(other.new_to_old(k))`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation, SparseError> {
        if self.order() != other.order() {
            return Err(SparseError::DimensionMismatch {
                expected: self.order(),
                found: other.order(),
            });
        }
        Permutation::new(other.perm.iter().map(|&k| self.perm[k]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &p)| k == p)
    }
}
