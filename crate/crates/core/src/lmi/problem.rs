use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LmiError;
use crate::lti::Frequency;
use crate::sparse::{Permutation, SparsityPattern, SymSparse};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VariableBounds {
    pub const UNIT: VariableBounds = VariableBounds {
        lower: 0.0,
        upper: 1.0,
    };
}

/// Affine matrix function `F(y) = F_0 + sum_i y_i F_i`, real symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineLmi {
    pub constant: SymSparse,
    pub coefficients: Vec<SymSparse>,
    pub labels: Vec<String>,
    pub bounds: Vec<Option<VariableBounds>>,
    pub frequency: Option<Frequency>,
    /// Order before real embedding.
    pub hermitian_order: usize,
}

impl AffineLmi {
    pub fn order(&self) -> usize {
        self.constant.order()
    }

    pub fn evaluate(&self, y: &[f64]) -> DMatrix<f64> {
        let mut f = self.constant.to_dense();
        for (yi, fi) in y.iter().zip(&self.coefficients) {
            for &(r, c, v) in fi.entries() {
                f[(r, c)] += yi * v;
                if r != c {
                    f[(c, r)] += yi * v;
                }
            }
        }
        f
    }
}

/// `eps = 1e-6 (1 + scale)` where `scale` is the largest entry of `F_0` and of
/// the coefficients, i.e. the size of `F` over the unit box.
pub fn default_epsilon(f: &AffineLmi) -> f64 {
    let scale = f
        .coefficients
        .iter()
        .map(SymSparse::max_abs)
        .fold(f.constant.max_abs(), f64::max);
    1e-6 * (1.0 + scale)
}

/// Moves `F(y) <= -eps I` into `sum y_i Q_i + S = W`: `W = -eps I - F_0`,
/// `Q_i = F_i`, `b = 0`.
pub fn to_dual_form(f: &AffineLmi, eps: f64) -> Result<SdpFeasibilityProblem, LmiError> {
    let n = f.order();
    let w = f
        .constant
        .scaled(-1.0)
        .add_scaled(&SymSparse::identity(n), -eps)?;
    let mut p = SdpFeasibilityProblem::new(w, f.coefficients.clone())?
        .with_labels(f.labels.clone())?
        .with_bounds(f.bounds.clone())?
        .with_epsilon(eps)
        .with_hermitian_order(f.hermitian_order);
    p.frequency = f.frequency;
    Ok(p)
}

/// Data `(W, Q_1..Q_m, b = 0)` of `sum_i y_i Q_i + S = W, S >= 0`, together
/// with the aggregate pattern of all matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpFeasibilityProblem {
    order: usize,
    w: SymSparse,
    q: Vec<SymSparse>,
    b: Vec<f64>,
    pattern: SparsityPattern,
    labels: Vec<String>,
    bounds: Vec<Option<VariableBounds>>,
    frequency: Option<Frequency>,
    epsilon: f64,
    hermitian_order: usize,
}

impl SdpFeasibilityProblem {
    pub fn new(w: SymSparse, q: Vec<SymSparse>) -> Result<Self, LmiError> {
        let n = w.order();
        let mut pattern = w.pattern();
        for (i, qi) in q.iter().enumerate() {
            if qi.order() != n {
                return Err(LmiError::DimensionMismatch(format!(
                    "Q{} has order {}, W has order {n}",
                    i + 1,
                    qi.order()
                )));
            }
            pattern = pattern.union(&qi.pattern())?;
        }
        let m = q.len();
        Ok(Self {
            order: n,
            w,
            b: vec![0.0; m],
            pattern,
            labels: (1..=m).map(|i| format!("y{i}")).collect(),
            bounds: vec![None; m],
            q,
            frequency: None,
            epsilon: 0.0,
            hermitian_order: n,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, LmiError> {
        if labels.len() != self.q.len() {
            return Err(LmiError::DimensionMismatch(format!(
                "{} labels for {} variables",
                labels.len(),
                self.q.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_bounds(mut self, bounds: Vec<Option<VariableBounds>>) -> Result<Self, LmiError> {
        if bounds.len() != self.q.len() {
            return Err(LmiError::DimensionMismatch(format!(
                "{} bounds for {} variables",
                bounds.len(),
                self.q.len()
            )));
        }
        if let Some(b) = bounds.iter().flatten().find(|b| !(b.lower < b.upper)) {
            return Err(LmiError::DimensionMismatch(format!(
                "empty bound interval [{}, {}]",
                b.lower, b.upper
            )));
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn with_frequency(mut self, w: Frequency) -> Self {
        self.frequency = Some(w);
        self
    }

    pub fn with_hermitian_order(mut self, n: usize) -> Self {
        self.hermitian_order = n;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of variables `m`.
    pub fn m(&self) -> usize {
        self.q.len()
    }

    pub fn w(&self) -> &SymSparse {
        &self.w
    }

    pub fn q(&self) -> &[SymSparse] {
        &self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn bounds(&self) -> &[Option<VariableBounds>] {
        &self.bounds
    }

    pub fn frequency(&self) -> Option<Frequency> {
        self.frequency
    }

    /// The `eps` that was folded into `W`; zero for hand-built problems.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn hermitian_order(&self) -> usize {
        self.hermitian_order
    }

    /// `W - sum_i y_i Q_i` as a dense matrix.
    pub fn slack(&self, y: &[f64]) -> DMatrix<f64> {
        let mut s = self.w.to_dense();
        for (yi, qi) in y.iter().zip(&self.q) {
            for &(r, c, v) in qi.entries() {
                s[(r, c)] -= yi * v;
                if r != c {
                    s[(c, r)] -= yi * v;
                }
            }
        }
        s
    }

    /// Same problem with every matrix replaced by `P^T M P`.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self, LmiError> {
        let q = self
            .q
            .iter()
            .map(|qi| qi.permuted(perm))
            .collect::<Result<Vec<_>, _>>()?;
        let mut p = Self::new(self.w.permuted(perm)?, q)?;
        p.labels = self.labels.clone();
        p.bounds = self.bounds.clone();
        p.frequency = self.frequency;
        p.epsilon = self.epsilon;
        p.hermitian_order = self.hermitian_order;
        Ok(p)
    }

    /// Same problem with `W` and every `Q_i` multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut p = self.clone();
        p.w = p.w.scaled(alpha);
        for qi in p.q.iter_mut() {
            *qi = qi.scaled(alpha);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moves_constant_to_right_hand_side() {
        let f = AffineLmi {
            constant: SymSparse::identity(2).scaled(-1.0),
            coefficients: vec![SymSparse::identity(2)],
            labels: vec!["y".into()],
            bounds: vec![None],
            frequency: None,
            hermitian_order: 2,
        };
        let p = to_dual_form(&f, 0.0).unwrap();
        assert_eq!(p.w(), &SymSparse::identity(2));
        assert_eq!(p.q(), &[SymSparse::identity(2)]);
        assert_eq!(p.b(), &[0.0]);
    }

    #[test]
    fn zero_constant_gives_minus_eps_identity() {
        let q = SymSparse::from_triplets(3, [(0, 0, 1.0), (2, 1, 0.5)]).unwrap();
        let f = AffineLmi {
            constant: SymSparse::zeros(3),
            coefficients: vec![q.clone(), q],
            labels: vec!["a".into(), "b".into()],
            bounds: vec![None, None],
            frequency: None,
            hermitian_order: 3,
        };
        let p = to_dual_form(&f, 1e-6).unwrap();
        assert_eq!(p.w(), &SymSparse::identity(3).scaled(-1e-6));
        assert!(p.w().pattern().is_subset_of(p.pattern()));
        assert!(p.q()[0].pattern().is_subset_of(p.pattern()));
    }

    #[test]
    fn reconstructs_affine_map() {
        let f = AffineLmi {
            constant: SymSparse::from_triplets(2, [(0, 0, 0.3), (1, 0, -0.2)]).unwrap(),
            coefficients: vec![
                SymSparse::from_triplets(2, [(1, 1, 2.0)]).unwrap(),
                SymSparse::from_triplets(2, [(1, 0, 1.0), (0, 0, -1.0)]).unwrap(),
            ],
            labels: vec!["a".into(), "b".into()],
            bounds: vec![None, None],
            frequency: None,
            hermitian_order: 2,
        };
        let eps = 0.01;
        let p = to_dual_form(&f, eps).unwrap();
        let y = [0.7, -1.3];
        // S = W - sum y Q = -eps I - F(y).
        let s = p.slack(&y);
        let expect = -f.evaluate(&y) - DMatrix::identity(2, 2) * eps;
        assert!((s - expect).norm() < 1e-15);
    }

    #[test]
    fn label_and_order_checks() {
        let w = SymSparse::identity(2);
        assert!(SdpFeasibilityProblem::new(w.clone(), vec![SymSparse::identity(3)]).is_err());
        let p = SdpFeasibilityProblem::new(w, vec![SymSparse::identity(2)]).unwrap();
        assert!(p.clone().with_labels(vec![]).is_err());
        assert!(p
            .with_bounds(vec![Some(VariableBounds {
                lower: 1.0,
                upper: 0.0
            })])
            .is_err());
    }
}
