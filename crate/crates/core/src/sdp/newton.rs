use nalgebra::{Cholesky, DMatrix, DVector};

use super::SdpError;
use crate::sparse::{CholeskyFactor, SparsityPattern, SymSparse};

/// `H_ij = tr(S^{-1} Q_i S^{-1} Q_j)` and `r_i = tr(S^{-1} Q_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonSystem {
    pub h: DMatrix<f64>,
    pub r: DVector<f64>,
}

/// Newton system from a sparse factor of `S`.
pub fn assemble_newton(
    factor: &CholeskyFactor<'_>,
    qs: &[SymSparse],
) -> Result<NewtonSystem, SdpError> {
    let plan = HessianPlan::new(factor.order(), qs)?;
    Ok(plan.assemble(&factor.inverse()))
}

/// Newton system from a dense positive definite `S`.
pub fn assemble_newton_dense(s: &DMatrix<f64>, qs: &[SymSparse]) -> Result<NewtonSystem, SdpError> {
    let n = s.nrows();
    let chol = Cholesky::new(s.clone())
        .ok_or(crate::sparse::SparseError::NotPositiveDefinite { pivot: 0 })?;
    let plan = HessianPlan::new(n, qs)?;
    Ok(plan.assemble(&chol.inverse()))
}

struct MatPlan {
    entries: Vec<(usize, usize, f64)>,
    /// Position of each entry in the union pattern.
    union_pos: Vec<usize>,
    /// Indices of nonzero columns, and each such column as `(row, value)`.
    support: Vec<usize>,
    columns: Vec<Vec<(usize, f64)>>,
    /// Form `Z Q Z` with dense products instead of support-restricted sums.
    dense: bool,
}

/// Structure of a fixed list of constraint matrices, reused across Newton
/// steps. `T_j = Z Q_j Z` is evaluated only on the union pattern of the
/// matrices, using `Z Q_j` restricted to the support columns of `Q_j`.
pub(crate) struct HessianPlan {
    n: usize,
    union_rows: Vec<usize>,
    union_cols: Vec<usize>,
    mats: Vec<MatPlan>,
}

impl HessianPlan {
    pub(crate) fn new(n: usize, qs: &[SymSparse]) -> Result<Self, SdpError> {
        let mut union = SparsityPattern::diagonal(n);
        for (k, q) in qs.iter().enumerate() {
            if q.order() != n {
                return Err(SdpError::DimensionMismatch(format!(
                    "matrix {k} has order {}, expected {n}",
                    q.order()
                )));
            }
            union = union.union(&q.pattern())?;
        }
        let (union_rows, union_cols): (Vec<usize>, Vec<usize>) = union.entries().unzip();
        let nf = n as f64;
        let mats = qs
            .iter()
            .map(|q| {
                let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
                for &(r, c, v) in q.entries() {
                    cols[c].push((r, v));
                    if r != c {
                        cols[r].push((c, v));
                    }
                }
                let support: Vec<usize> = (0..n).filter(|&c| !cols[c].is_empty()).collect();
                let columns: Vec<Vec<(usize, f64)>> = support
                    .iter()
                    .map(|&c| std::mem::take(&mut cols[c]))
                    .collect();
                let full_nnz: usize = columns.iter().map(Vec::len).sum();
                let sparse_cost =
                    nf * full_nnz as f64 + union_rows.len() as f64 * support.len() as f64;
                // Dense products run several times faster per flop.
                let dense = sparse_cost > nf * nf * nf / 2.0;
                MatPlan {
                    union_pos: q
                        .entries()
                        .iter()
                        .map(|&(r, c, _)| union.position(r, c).expect("entry is in the union"))
                        .collect(),
                    entries: q.entries().to_vec(),
                    support,
                    columns,
                    dense,
                }
            })
            .collect();
        Ok(Self {
            n,
            union_rows,
            union_cols,
            mats,
        })
    }

    /// `sum_{entries} w v T[pos]` with weight 2 off the diagonal.
    fn contract(mat: &MatPlan, t: &[f64]) -> f64 {
        mat.entries
            .iter()
            .zip(&mat.union_pos)
            .map(|(&(r, c, v), &p)| if r == c { v * t[p] } else { 2.0 * v * t[p] })
            .sum()
    }

    /// Newton system for `Z = S^{-1}`. Summation order is fixed, so the
    /// result is deterministic.
    pub(crate) fn assemble(&self, z: &DMatrix<f64>) -> NewtonSystem {
        let n = self.n;
        let m = self.mats.len();
        let mut h = DMatrix::zeros(m, m);
        let mut r = DVector::zeros(m);
        let zu: Vec<f64> = self
            .union_rows
            .iter()
            .zip(&self.union_cols)
            .map(|(&a, &b)| z[(a, b)])
            .collect();
        let mut t = vec![0.0; self.union_rows.len()];
        let mut rj: Vec<f64> = Vec::new();
        let mut vj: Vec<f64> = Vec::new();
        for (j, mj) in self.mats.iter().enumerate() {
            r[j] = Self::contract(mj, &zu);
            if mj.dense {
                let mut qd = DMatrix::zeros(n, n);
                for &(a, b, v) in &mj.entries {
                    qd[(a, b)] = v;
                    qd[(b, a)] = v;
                }
                let prod = z * qd * z;
                for (p, (&a, &b)) in self.union_rows.iter().zip(&self.union_cols).enumerate() {
                    t[p] = prod[(a, b)];
                }
            } else {
                let s = mj.support.len();
                // rj = Z Q_j on support columns, vj = Z on support columns;
                // both row-major n x s.
                rj.clear();
                rj.resize(n * s, 0.0);
                vj.clear();
                vj.resize(n * s, 0.0);
                for (k, (&c, col)) in mj.support.iter().zip(&mj.columns).enumerate() {
                    for &(b, v) in col {
                        let zb = z.column(b);
                        for a in 0..n {
                            rj[a * s + k] += v * zb[a];
                        }
                    }
                    let zc = z.column(c);
                    for a in 0..n {
                        vj[a * s + k] = zc[a];
                    }
                }
                for (p, (&a, &b)) in self.union_rows.iter().zip(&self.union_cols).enumerate() {
                    let ra = &rj[a * s..(a + 1) * s];
                    let vb = &vj[b * s..(b + 1) * s];
                    t[p] = ra.iter().zip(vb).map(|(x, y)| x * y).sum();
                }
            }
            for i in j..m {
                let hij = Self::contract(&self.mats[i], &t);
                h[(i, j)] = hij;
                h[(j, i)] = hij;
            }
        }
        NewtonSystem { h, r }
    }
}
