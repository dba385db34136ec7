use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Permutation, SparseError, SparsityPattern};

/// Real symmetric matrix holding its lower triangle as sorted `(row, col, value)` triplets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymSparse {
    order: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymSparse {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: Vec::new(),
        }
    }

    pub fn identity(order: usize) -> Self {
        Self {
            order,
            entries: (0..order)
                .map(|i| (i, i))
                .map(|(i, j)| (i, j, 1.0))
                .collect(),
        }
    }

    /// Entries above the diagonal are mirrored into the lower triangle;
    /// duplicates are summed and exact zeros dropped.
    pub fn from_triplets<I>(order: usize, triplets: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries = Vec::new();
        for (r, c, v) in triplets {
            if r >= order || c >= order {
                return Err(SparseError::IndexOutOfRange {
                    row: r,
                    col: c,
                    order,
                });
            }
            let (hi, lo) = if r >= c { (r, c) } else { (c, r) };
            entries.push((hi, lo, v));
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Ok(Self {
            order,
            entries: merged,
        })
    }

    /// Reads the lower triangle of a dense matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut entries = Vec::new();
        for j in 0..n {
            for i in j..n {
                let v = m[(i, j)];
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { order: n, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let key = if row >= col { (col, row) } else { (row, col) };
        self.entries
            .binary_search_by(|e| (e.1, e.0).cmp(&key))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.order, self.order);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn pattern(&self) -> SparsityPattern {
        SparsityPattern::new(self.order, self.entries.iter().map(|e| (e.0, e.1)))
            .expect("entries are in range")
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> SymSparse {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            e.2 *= alpha;
        }
        out.entries.retain(|e| e.2 != 0.0);
        out
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &SymSparse, alpha: f64) -> Result<SymSparse, SparseError> {
        if self.order != other.order {
            return Err(SparseError::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        SymSparse::from_triplets(
            self.order,
            self.entries
                .iter()
                .copied()
                .chain(other.entries.iter().map(|&(i, j, v)| (i, j, alpha * v))),
        )
    }

    /// `P^T M P` with the same convention as [`SparsityPattern::permuted`].
    pub fn permuted(&self, perm: &Permutation) -> Result<SymSparse, SparseError> {
        if perm.order() != self.order {
            return Err(SparseError::DimensionMismatch {
                expected: self.order,
                found: perm.order(),
            });
        }
        SymSparse::from_triplets(
            self.order,
            self.entries
                .iter()
                .map(|&(i, j, v)| (perm.old_to_new(i), perm.old_to_new(j), v)),
        )
    }

    /// Frobenius inner product `trace(self * other)` for symmetric operands.
    pub fn dot(&self, other: &SymSparse) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut s = 0.0;
        while a < self.entries.len() && b < other.entries.len() {
            let ka = (self.entries[a].1, self.entries[a].0);
            let kb = (other.entries[b].1, other.entries[b].0);
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    let w = if ka.0 == ka.1 { 1.0 } else { 2.0 };
                    s += w * self.entries[a].2 * other.entries[b].2;
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_mirror() {
        let m = SymSparse::from_triplets(3, [(0, 1, 2.0), (1, 0, 1.0), (2, 2, 0.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn dense_round_trip() {
        let d = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 5.0, -2.0, 0.0, -2.0, 6.0]);
        assert_eq!(SymSparse::from_dense(&d).to_dense(), d);
    }

    #[test]
    fn dot_matches_dense_trace() {
        let a = SymSparse::from_triplets(3, [(0, 0, 1.0), (2, 0, 2.0), (1, 1, -1.0)]).unwrap();
        let b = SymSparse::from_triplets(3, [(0, 0, 3.0), (2, 0, 0.5), (2, 2, 7.0)]).unwrap();
        let expect = (a.to_dense() * b.to_dense()).trace();
        assert!((a.dot(&b) - expect).abs() < 1e-14);
    }
}
