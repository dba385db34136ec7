use super::{Permutation, SparseError, SparsityPattern};

const NONE: usize = usize::MAX;

/// Structure of the Cholesky factor of `P^T A P` for a given pattern and ordering.
#[derive(Clone, Debug)]
pub struct SymbolicFactor {
    input: SparsityPattern,
    permuted: SparsityPattern,
    permutation: Permutation,
    filled: SparsityPattern,
    parent: Vec<usize>,
    fill_count: usize,
    // Row k of the permuted lower triangle (cols <= k) as (col, input value position).
    row_ptr: Vec<usize>,
    row_src: Vec<(usize, usize)>,
}

impl SymbolicFactor {
    /// Pattern the factor was computed for, in original indices.
    pub fn input(&self) -> &SparsityPattern {
        &self.input
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    /// Pattern of `L` (equivalently the lower half of `L + L^T`) in permuted indices.
    pub fn filled(&self) -> &SparsityPattern {
        &self.filled
    }

    /// `P^T A P` pattern before fill.
    pub fn permuted_input(&self) -> &SparsityPattern {
        &self.permuted
    }

    /// Elimination tree; roots are `None`.
    pub fn parent(&self, j: usize) -> Option<usize> {
        match self.parent[j] {
            NONE => None,
            p => Some(p),
        }
    }

    pub fn fill_count(&self) -> usize {
        self.fill_count
    }

    /// Fill entries as a fraction of the filled pattern.
    pub fn fill_ratio(&self) -> f64 {
        if self.filled.nnz() == 0 {
            0.0
        } else {
            self.fill_count as f64 / self.filled.nnz() as f64
        }
    }

    pub fn order(&self) -> usize {
        self.input.order()
    }

    pub(crate) fn row_sources(&self, k: usize) -> &[(usize, usize)] {
        &self.row_src[self.row_ptr[k]..self.row_ptr[k + 1]]
    }
}

/// Computes the filled pattern by merging child column structures up the
/// elimination tree.
pub fn symbolic_factor(
    pattern: &SparsityPattern,
    perm: &Permutation,
) -> Result<SymbolicFactor, SparseError> {
    let n = pattern.order();
    if perm.order() != n {
        return Err(SparseError::DimensionMismatch {
            expected: n,
            found: perm.order(),
        });
    }
    let permuted = pattern.permuted(perm)?;

    // Lower-triangular rows of the permuted matrix: row k holds columns i < k.
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in permuted.entries() {
        if i != j {
            rows[i].push(j);
        }
    }

    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for (k, row) in rows.iter().enumerate() {
        for &i in row {
            let mut r = i;
            while ancestor[r] != NONE && ancestor[r] != k {
                let next = ancestor[r];
                ancestor[r] = k;
                r = next;
            }
            if ancestor[r] == NONE {
                ancestor[r] = k;
                parent[r] = k;
            }
        }
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, &p) in parent.iter().enumerate() {
        if p != NONE {
            children[p].push(c);
        }
    }

    let mut mark = vec![NONE; n];
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = Vec::new();
        mark[j] = j;
        col.push(j);
        for &i in permuted.column(j) {
            if mark[i] != j {
                mark[i] = j;
                col.push(i);
            }
        }
        for &c in &children[j] {
            for &i in &columns[c] {
                if i > j && mark[i] != j {
                    mark[i] = j;
                    col.push(i);
                }
            }
        }
        col.sort_unstable();
        columns.push(col);
    }
    let filled = SparsityPattern::from_columns(n, columns);
    let fill_count = filled.nnz() - permuted.nnz();

    let mut by_row: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (pos, (i, j)) in pattern.entries().enumerate() {
        let (a, b) = (perm.old_to_new(i), perm.old_to_new(j));
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        by_row[hi].push((lo, pos));
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut row_src = Vec::with_capacity(pattern.nnz());
    row_ptr.push(0);
    for mut r in by_row {
        r.sort_unstable();
        row_src.extend(r);
        row_ptr.push(row_src.len());
    }

    Ok(SymbolicFactor {
        input: pattern.clone(),
        permuted,
        permutation: perm.clone(),
        filled,
        parent,
        fill_count,
        row_ptr,
        row_src,
    })
}
