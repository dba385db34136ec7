use nalgebra::DMatrix;

use super::system::C64;
use super::{block_diag, Frequency, LtiError};
use crate::model::{InterconnectedSystem, SubsystemResponse};

/// Largest tolerated 1-norm condition number of `I - Gamma G_zw`.
const MAX_CONDITION: f64 = 1e12;

fn norm1<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(I - M)^{-1}` when it exists with acceptable conditioning.
fn guarded_inverse<T>(m: DMatrix<T>) -> Option<DMatrix<T>>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let n = m.nrows();
    let a = DMatrix::<T>::identity(n, n) - m;
    let inv = a.clone().lu().try_inverse()?;
    let cond = norm1(&a) * norm1(&inv);
    (cond.is_finite() && cond < MAX_CONDITION).then_some(inv)
}

/// Closed-loop `G_pq + G_pw (I - Gamma G_zw)^{-1} Gamma G_zq` at one frequency.
pub fn lumped_response(sys: &InterconnectedSystem, w: Frequency) -> Result<DMatrix<C64>, LtiError> {
    let resp = sys.responses(w)?;
    lumped_from_responses(sys, &resp, w)
}

pub(crate) fn lumped_from_responses(
    sys: &InterconnectedSystem,
    resp: &[SubsystemResponse],
    w: Frequency,
) -> Result<DMatrix<C64>, LtiError> {
    let d_off = sys.d_offsets();
    let w_off = sys.interconnection().row_offsets();
    let dbar = *d_off.last().unwrap();
    let mut g = DMatrix::zeros(dbar, dbar);
    for (i, r) in resp.iter().enumerate() {
        g.view_mut((d_off[i], d_off[i]), r.pq.shape())
            .copy_from(&r.pq);
    }
    if sys.total_m() == 0 {
        return Ok(g);
    }
    let inv = guarded_inverse(sys.loop_gain(resp))
        .ok_or(LtiError::IllPosedInterconnection { omega: w })?;
    let x = inv * sys.gamma_g_zq(resp);
    for (i, r) in resp.iter().enumerate() {
        let (d, m) = r.pw.shape();
        if d == 0 || m == 0 {
            continue;
        }
        let rows = &r.pw * x.rows(w_off[i], m);
        let mut target = g.rows_mut(d_off[i], d);
        target += rows;
    }
    Ok(g)
}

/// State matrix of the closed `z`/`w` loop,
/// `A_zw + B_zw (I - Gamma D_zw)^{-1} Gamma C_zw`.
pub fn lumped_state_matrix(sys: &InterconnectedSystem) -> Result<DMatrix<f64>, LtiError> {
    let zw: Vec<_> = sys.subsystems().iter().map(|s| s.g_zw().clone()).collect();
    let g_zw = block_diag(&zw)?;
    let gamma = sys.interconnection();
    let mut a = g_zw.a_dense();
    if gamma.rows() == 0 {
        return Ok(a);
    }
    let mut gd = DMatrix::zeros(gamma.rows(), gamma.rows());
    let mut gc = DMatrix::zeros(gamma.rows(), g_zw.states());
    for (r, c) in gamma.entries() {
        gd.row_mut(r).copy_from(&g_zw.d().row(c));
        gc.row_mut(r).copy_from(&g_zw.c().row(c));
    }
    let inv = guarded_inverse(gd).ok_or(LtiError::IllPosedInterconnection {
        omega: Frequency::Infinity,
    })?;
    a += g_zw.b() * (inv * gc);
    Ok(a)
}
