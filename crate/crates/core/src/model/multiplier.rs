use nalgebra::{DMatrix, DVector};

use super::{IqcMultiplierSpec, ModelError, MultiplierKind};

/// `[[Pi11, Pi12], [Pi21, Pi22]]`, each block of order `sum d_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMultiplier {
    pub p11: DMatrix<f64>,
    pub p12: DMatrix<f64>,
    pub p21: DMatrix<f64>,
    pub p22: DMatrix<f64>,
}

impl BlockMultiplier {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.p11.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.p11);
        m.view_mut((0, n), (n, n)).copy_from(&self.p12);
        m.view_mut((n, 0), (n, n)).copy_from(&self.p21);
        m.view_mut((n, n), (n, n)).copy_from(&self.p22);
        m
    }
}

/// Block-diagonal network multiplier from per-subsystem values `r_i >= 0`.
pub fn diag_multiplier(
    specs: &[IqcMultiplierSpec],
    values: &[f64],
) -> Result<BlockMultiplier, ModelError> {
    if specs.len() != values.len() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} specs but {} values",
            specs.len(),
            values.len()
        )));
    }
    let mut diag = Vec::new();
    for (i, (spec, &r)) in specs.iter().zip(values).enumerate() {
        if !(r >= 0.0) {
            return Err(ModelError::NegativeMultiplier { index: i, value: r });
        }
        match spec.kind {
            MultiplierKind::ParametricScalar => diag.extend(std::iter::repeat_n(r, spec.dim)),
        }
    }
    let d = DVector::from_vec(diag);
    let n = d.len();
    Ok(BlockMultiplier {
        p11: DMatrix::from_diagonal(&d),
        p12: DMatrix::zeros(n, n),
        p21: DMatrix::zeros(n, n),
        p22: -DMatrix::from_diagonal(&d),
    })
}
