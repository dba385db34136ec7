use serde::{Deserialize, Serialize};

use super::{Permutation, SparseError};

/// Lower-triangular nonzero structure of a symmetric matrix, stored column-wise.
///
/// Row indices within a column are sorted and the diagonal is always present, so
/// the first entry of column `j` is `j` itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityPattern {
    order: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
}

impl SparsityPattern {
    /// Builds a pattern from arbitrary `(row, col)` pairs. Pairs above the
    /// diagonal are mirrored, duplicates are merged and the diagonal is added.
    pub fn new<I>(order: usize, entries: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut columns: Vec<Vec<usize>> = (0..order).map(|j| vec![j]).collect();
        for (r, c) in entries {
            if r >= order || c >= order {
                return Err(SparseError::IndexOutOfRange {
                    row: r,
                    col: c,
                    order,
                });
            }
            let (hi, lo) = if r >= c { (r, c) } else { (c, r) };
            if hi != lo {
                columns[lo].push(hi);
            }
        }
        Ok(Self::from_columns(order, columns))
    }

    pub fn diagonal(order: usize) -> Self {
        Self {
            order,
            col_ptr: (0..=order).collect(),
            row_idx: (0..order).collect(),
        }
    }

    /// Columns must each start with their own index; they get sorted and deduplicated here.
    pub(crate) fn from_columns(order: usize, mut columns: Vec<Vec<usize>>) -> Self {
        let mut col_ptr = Vec::with_capacity(order + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for col in columns.iter_mut() {
            col.sort_unstable();
            col.dedup();
            row_idx.extend_from_slice(col);
            col_ptr.push(row_idx.len());
        }
        Self {
            order,
            col_ptr,
            row_idx,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored (lower-triangular, diagonal included) entries.
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Number of nonzeros of the full symmetric matrix.
    pub fn full_nnz(&self) -> usize {
        2 * self.nnz() - self.order
    }

    pub fn density(&self) -> f64 {
        if self.order == 0 {
            return 0.0;
        }
        self.full_nnz() as f64 / (self.order as f64 * self.order as f64)
    }

    /// Sorted row indices of column `j`, diagonal first.
    pub fn column(&self, j: usize) -> &[usize] {
        &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub(crate) fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub(crate) fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        let (hi, lo) = if row >= col { (row, col) } else { (col, row) };
        if hi >= self.order {
            return false;
        }
        self.column(lo).binary_search(&hi).is_ok()
    }

    /// Position of `(row, col)` (row >= col) in the column-major value array.
    pub(crate) fn position(&self, row: usize, col: usize) -> Option<usize> {
        let (hi, lo) = if row >= col { (row, col) } else { (col, row) };
        self.column(lo)
            .binary_search(&hi)
            .ok()
            .map(|k| self.col_ptr[lo] + k)
    }

    /// Iterates `(row, col)` with `row >= col`, column-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order).flat_map(move |j| self.column(j).iter().map(move |&i| (i, j)))
    }

    pub fn union(&self, other: &SparsityPattern) -> Result<SparsityPattern, SparseError> {
        if self.order != other.order {
            return Err(SparseError::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        let columns = (0..self.order)
            .map(|j| {
                let mut c = self.column(j).to_vec();
                c.extend_from_slice(other.column(j));
                c
            })
            .collect();
        Ok(Self::from_columns(self.order, columns))
    }

    pub fn is_subset_of(&self, other: &SparsityPattern) -> bool {
        self.order == other.order && self.entries().all(|(i, j)| other.contains(i, j))
    }

    /// Symmetric permutation `P^T A P`: new index `k` holds old vertex `perm.new_to_old(k)`.
    pub fn permuted(&self, perm: &Permutation) -> Result<SparsityPattern, SparseError> {
        if perm.order() != self.order {
            return Err(SparseError::DimensionMismatch {
                expected: self.order,
                found: perm.order(),
            });
        }
        let mut columns: Vec<Vec<usize>> = (0..self.order).map(|j| vec![j]).collect();
        for (i, j) in self.entries() {
            let (a, b) = (perm.old_to_new(i), perm.old_to_new(j));
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            if hi != lo {
                columns[lo].push(hi);
            }
        }
        Ok(Self::from_columns(self.order, columns))
    }

    /// Off-diagonal neighbours of every vertex in the undirected graph of the pattern.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order];
        for (i, j) in self.entries() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrors_and_adds_diagonal() {
        let p = SparsityPattern::new(3, [(0, 2), (2, 0), (1, 0)]).unwrap();
        assert_eq!(p.nnz(), 5);
        assert_eq!(p.column(0), &[0, 1, 2]);
        assert!(p.contains(0, 2));
        assert!(!p.contains(1, 2));
        assert_eq!(p.full_nnz(), 7);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            SparsityPattern::new(2, [(2, 0)]),
            Err(SparseError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn union_and_subset() {
        let a = SparsityPattern::new(3, [(1, 0)]).unwrap();
        let b = SparsityPattern::new(3, [(2, 1)]).unwrap();
        let u = a.union(&b).unwrap();
        assert!(a.is_subset_of(&u) && b.is_subset_of(&u));
        assert!(!u.is_subset_of(&a));
    }
}
