use nalgebra::{DMatrix, DVector};

use super::{SparseError, SymSparse, SymbolicFactor};

/// Numeric factor `P^T A P = L L^T` stored on the symbolic filled pattern.
#[derive(Clone, Debug)]
pub struct CholeskyFactor<'a> {
    symbolic: &'a SymbolicFactor,
    values: Vec<f64>,
}

/// Factorizes a matrix given as triplets in original indices. Every entry must
/// lie on the symbolic factor's input pattern.
pub fn cholesky<'a>(
    matrix: &SymSparse,
    symbolic: &'a SymbolicFactor,
) -> Result<CholeskyFactor<'a>, SparseError> {
    let input = symbolic.input();
    if matrix.order() != input.order() {
        return Err(SparseError::DimensionMismatch {
            expected: input.order(),
            found: matrix.order(),
        });
    }
    let mut values = vec![0.0; input.nnz()];
    for &(i, j, v) in matrix.entries() {
        let pos = input
            .position(i, j)
            .ok_or(SparseError::PatternMismatch { row: i, col: j })?;
        values[pos] = v;
    }
    cholesky_on_pattern(&values, symbolic)
}

/// Up-looking simplicial factorization. `values` follows the column-major
/// entry order of `symbolic.input()`.
pub fn cholesky_on_pattern<'a>(
    values: &[f64],
    symbolic: &'a SymbolicFactor,
) -> Result<CholeskyFactor<'a>, SparseError> {
    let n = symbolic.order();
    if values.len() != symbolic.input().nnz() {
        return Err(SparseError::DimensionMismatch {
            expected: symbolic.input().nnz(),
            found: values.len(),
        });
    }
    let filled = symbolic.filled();
    let lp = filled.col_ptr();
    let li = filled.row_idx();
    let mut lx = vec![0.0; li.len()];
    // Next free slot in each column of L.
    let mut next: Vec<usize> = lp[..n].to_vec();
    let mut x = vec![0.0; n];
    let mut mark = vec![usize::MAX; n];
    let mut reach: Vec<usize> = Vec::with_capacity(n);

    for k in 0..n {
        reach.clear();
        mark[k] = k;
        let mut d = 0.0;
        for &(i, pos) in symbolic.row_sources(k) {
            if i == k {
                d += values[pos];
                continue;
            }
            x[i] += values[pos];
            let mut r = i;
            while mark[r] != k {
                mark[r] = k;
                reach.push(r);
                r = match symbolic.parent(r) {
                    Some(p) => p,
                    None => break,
                };
            }
        }
        reach.sort_unstable();
        for &i in &reach {
            let lki = x[i] / lx[lp[i]];
            x[i] = 0.0;
            for p in lp[i] + 1..next[i] {
                x[li[p]] -= lx[p] * lki;
            }
            d -= lki * lki;
            let p = next[i];
            debug_assert_eq!(li[p], k);
            lx[p] = lki;
            next[i] += 1;
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(SparseError::NotPositiveDefinite { pivot: k });
        }
        lx[next[k]] = d.sqrt();
        next[k] += 1;
    }

    Ok(CholeskyFactor {
        symbolic,
        values: lx,
    })
}

impl<'a> CholeskyFactor<'a> {
    pub fn symbolic(&self) -> &'a SymbolicFactor {
        self.symbolic
    }

    pub fn order(&self) -> usize {
        self.symbolic.order()
    }

    /// Diagonal of `L` in permuted order.
    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let lp = self.symbolic.filled().col_ptr();
        (0..self.order()).map(move |j| self.values[lp[j]])
    }

    /// `log det A = 2 * sum(log L_jj)`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.diagonal().map(f64::ln).sum::<f64>()
    }

    /// Dense copy of `L` in permuted indices.
    pub fn l_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        let filled = self.symbolic.filled();
        let mut l = DMatrix::zeros(n, n);
        for (p, (i, j)) in filled.entries().enumerate() {
            l[(i, j)] = self.values[p];
        }
        l
    }

    /// Dense `P L L^T P^T`, i.e. the reconstructed input.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.l_dense();
        let llt = &l * l.transpose();
        let perm = self.symbolic.permutation();
        let n = self.order();
        DMatrix::from_fn(n, n, |i, j| llt[(perm.old_to_new(i), perm.old_to_new(j))])
    }

    /// Solves `A x = b` in place on a single column, original indexing.
    pub fn solve_in_place(&self, b: &mut [f64], work: &mut [f64]) {
        let n = self.order();
        let perm = self.symbolic.permutation();
        let filled = self.symbolic.filled();
        let (lp, li, lx) = (filled.col_ptr(), filled.row_idx(), &self.values);
        for k in 0..n {
            work[k] = b[perm.new_to_old(k)];
        }
        for j in 0..n {
            let yj = work[j] / lx[lp[j]];
            work[j] = yj;
            for p in lp[j] + 1..lp[j + 1] {
                work[li[p]] -= lx[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let mut s = work[j];
            for p in lp[j] + 1..lp[j + 1] {
                s -= lx[p] * work[li[p]];
            }
            work[j] = s / lx[lp[j]];
        }
        for k in 0..n {
            b[perm.new_to_old(k)] = work[k];
        }
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>, SparseError> {
        if rhs.len() != self.order() {
            return Err(SparseError::DimensionMismatch {
                expected: self.order(),
                found: rhs.len(),
            });
        }
        let mut x = rhs.clone();
        let mut work = vec![0.0; self.order()];
        self.solve_in_place(x.as_mut_slice(), &mut work);
        Ok(x)
    }

    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>, SparseError> {
        if rhs.nrows() != self.order() {
            return Err(SparseError::DimensionMismatch {
                expected: self.order(),
                found: rhs.nrows(),
            });
        }
        let mut x = rhs.clone();
        let mut work = vec![0.0; self.order()];
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice(), &mut work);
        }
        Ok(x)
    }

    /// Dense `A^{-1}`, one sparse solve per column.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut z = DMatrix::identity(n, n);
        let mut work = vec![0.0; n];
        for mut col in z.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice(), &mut work);
        }
        z
    }
}
