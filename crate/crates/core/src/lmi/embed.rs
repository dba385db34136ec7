use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::LmiError;
use crate::lti::C64;
use crate::sparse::SymSparse;

const HERMITIAN_TOL: f64 = 1e-12;

/// `[[Re H, -Im H], [Im H, Re H]]`. Its spectrum is that of `H` with every
/// multiplicity doubled.
pub fn real_embed(h: &DMatrix<C64>) -> Result<DMatrix<f64>, LmiError> {
    if !h.is_square() {
        return Err(LmiError::DimensionMismatch(format!(
            "Hermitian input is {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = 1.0 + h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let dev = (h - h.adjoint())
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if dev > HERMITIAN_TOL * scale {
        return Err(LmiError::NotHermitian(dev));
    }
    let n = h.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            r[(i, j)] = z.re;
            r[(n + i, n + j)] = z.re;
            r[(n + i, j)] = z.im;
            r[(i, n + j)] = -z.im;
        }
    }
    Ok(r)
}

/// Sparse Hermitian matrix assembled from additive contributions and then
/// real-embedded. Only the lower triangle `(a >= b)` is stored.
#[derive(Clone, Debug, Default)]
pub struct HermitianAccumulator {
    order: usize,
    lower: BTreeMap<(usize, usize), C64>,
}

impl HermitianAccumulator {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            lower: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Adds `v` at `(a, b)` and, implicitly, `conj(v)` at `(b, a)`.
    pub fn add(&mut self, a: usize, b: usize, v: C64) {
        assert!(a < self.order && b < self.order);
        let (key, v) = if a >= b {
            ((a, b), v)
        } else {
            ((b, a), v.conj())
        };
        *self.lower.entry(key).or_default() += v;
    }

    /// Adds `c * u^H u` for a sparse row vector `u` given as `(index, value)`.
    pub fn add_gram(&mut self, u: &[(usize, C64)], c: f64) {
        for &(a, ua) in u {
            for &(b, ub) in u {
                if a >= b {
                    self.add(a, b, ua.conj() * ub * c);
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut h = DMatrix::zeros(self.order, self.order);
        for (&(a, b), &v) in &self.lower {
            h[(a, b)] = v;
            h[(b, a)] = v.conj();
        }
        h
    }

    /// Real embedding as a sparse symmetric matrix of order `2n`. Exact zeros
    /// are dropped, so real data yields a block-diagonal pattern.
    pub fn embed(&self) -> SymSparse {
        let n = self.order;
        let mut t = Vec::with_capacity(4 * self.lower.len());
        for (&(a, b), &h) in &self.lower {
            t.push((a, b, h.re));
            t.push((n + a, n + b, h.re));
            if a != b {
                t.push((n + a, b, h.im));
                t.push((n + b, a, -h.im));
            }
        }
        SymSparse::from_triplets(2 * n, t).expect("indices are within the embedded order")
    }
}
