use super::{
    default_epsilon, to_dual_form, AffineLmi, HermitianAccumulator, LmiError,
    SdpFeasibilityProblem, VariableBounds,
};
use crate::lti::{lumped_from_responses, Frequency, C64};
use crate::model::InterconnectedSystem;
use crate::sparse::SymSparse;

fn r_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("r{i}")).collect()
}

/// `sum_i r_i (Gbar^H E_i Gbar - E_i) <= -eps I`, where `E_i` selects the
/// uncertainty channels of subsystem `i` and `Gbar` is the closed loop from
/// `q` to `p`. Hermitian order `d-bar`.
pub fn lumped_affine(sys: &InterconnectedSystem, w: Frequency) -> Result<AffineLmi, LmiError> {
    let resp = sys.responses(w)?;
    let g = lumped_from_responses(sys, &resp, w)?;
    let d_off = sys.d_offsets();
    let n = g.nrows();
    let mut coefficients = Vec::with_capacity(sys.len());
    for i in 0..sys.len() {
        let (lo, hi) = (d_off[i], d_off[i + 1]);
        let mut acc = HermitianAccumulator::new(n);
        for c in lo..hi {
            let row: Vec<(usize, C64)> = (0..n).map(|k| (k, g[(c, k)])).collect();
            acc.add_gram(&row, 1.0);
            acc.add(c, c, C64::new(-1.0, 0.0));
        }
        coefficients.push(acc.embed());
    }
    Ok(AffineLmi {
        constant: SymSparse::zeros(2 * n),
        labels: r_labels(sys.len()),
        bounds: vec![Some(VariableBounds::UNIT); sys.len()],
        coefficients,
        frequency: Some(w),
        hermitian_order: n,
    })
}

/// Keeps `w` as a variable next to `q` (Hermitian order `d-bar + m-bar`):
///
/// `sum_i r_i (P_i^H P_i - E_i) - x K^H K <= -eps I`
///
/// with `P_i = [G^i_pq, G^i_pw]` on subsystem `i`'s own `q` and `w`
/// coordinates and `K = [-Gamma G_zq, I - Gamma G_zw]`. Each `r_i` term touches
/// only its own subsystem; `K` couples subsystems along the nonzeros of `Gamma`.
pub fn sparse_affine(sys: &InterconnectedSystem, w: Frequency) -> Result<AffineLmi, LmiError> {
    let resp = sys.responses(w)?;
    let gamma = sys.interconnection();
    let d_off = sys.d_offsets();
    let dbar = *d_off.last().unwrap();
    // Coordinates: q first, then w.
    let w_off: Vec<usize> = gamma.row_offsets().iter().map(|&o| dbar + o).collect();
    let n = dbar + sys.total_m();

    let mut coefficients = Vec::with_capacity(sys.len() + 1);
    for (i, r) in resp.iter().enumerate() {
        let mut acc = HermitianAccumulator::new(n);
        for c in 0..r.pq.nrows() {
            let mut row: Vec<(usize, C64)> = Vec::with_capacity(r.pq.ncols() + r.pw.ncols());
            row.extend((0..r.pq.ncols()).map(|k| (d_off[i] + k, r.pq[(c, k)])));
            row.extend((0..r.pw.ncols()).map(|k| (w_off[i] + k, r.pw[(c, k)])));
            acc.add_gram(&row, 1.0);
            acc.add(d_off[i] + c, d_off[i] + c, C64::new(-1.0, 0.0));
        }
        coefficients.push(acc.embed());
    }

    let mut acc = HermitianAccumulator::new(n);
    for row_idx in 0..gamma.rows() {
        let mut row: Vec<(usize, C64)> = Vec::new();
        if let Some(c) = gamma.source(row_idx) {
            let (j, b) = gamma.col_owner(c);
            let rj = &resp[j];
            row.extend((0..rj.zq.ncols()).map(|k| (d_off[j] + k, -rj.zq[(b, k)])));
            row.extend((0..rj.zw.ncols()).map(|k| (w_off[j] + k, -rj.zw[(b, k)])));
        }
        let diag = dbar + row_idx;
        match row.iter_mut().find(|e| e.0 == diag) {
            Some(e) => e.1 += 1.0,
            None => row.push((diag, C64::new(1.0, 0.0))),
        }
        acc.add_gram(&row, -1.0);
    }
    coefficients.push(acc.embed());

    let mut labels = r_labels(sys.len());
    labels.push("x".into());
    Ok(AffineLmi {
        constant: SymSparse::zeros(2 * n),
        bounds: vec![Some(VariableBounds::UNIT); labels.len()],
        labels,
        coefficients,
        frequency: Some(w),
        hermitian_order: n,
    })
}

pub fn lumped_lmi(
    sys: &InterconnectedSystem,
    w: Frequency,
) -> Result<SdpFeasibilityProblem, LmiError> {
    let f = lumped_affine(sys, w)?;
    to_dual_form(&f, default_epsilon(&f))
}

pub fn sparse_lmi(
    sys: &InterconnectedSystem,
    w: Frequency,
) -> Result<SdpFeasibilityProblem, LmiError> {
    let f = sparse_affine(sys, w)?;
    to_dual_form(&f, default_epsilon(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::StateSpaceSystem;
    use crate::model::{InterconnectionMatrix, IqcMultiplierSpec, Subsystem};
    use nalgebra::DMatrix;

    fn gain(p: usize, m: usize, v: f64) -> StateSpaceSystem {
        StateSpaceSystem::static_gain(DMatrix::from_element(p, m, v))
    }

    fn isolated(pq: f64) -> InterconnectedSystem {
        let s = Subsystem::new(
            gain(1, 1, pq),
            gain(1, 0, 0.0),
            gain(0, 1, 0.0),
            gain(0, 0, 0.0),
            IqcMultiplierSpec::parametric_scalar(1),
        )
        .unwrap();
        InterconnectedSystem::new(
            vec![s],
            InterconnectionMatrix::zero(vec![0], vec![0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_lumped_coefficient() {
        let w = Frequency::Finite(1.0);
        let f = lumped_affine(&isolated(0.5), w).unwrap();
        assert_eq!(f.hermitian_order, 1);
        // r (|g|^2 - 1) embedded twice.
        assert_eq!(
            f.evaluate(&[1.0]),
            DMatrix::from_row_slice(2, 2, &[-0.75, 0.0, 0.0, -0.75])
        );
        let f = lumped_affine(&isolated(2.0), w).unwrap();
        assert_eq!(f.coefficients[0].get(0, 0), 3.0);
    }

    #[test]
    fn unconnected_sparse_form_decouples() {
        // Gamma = 0, G_pw = 0: the x term is -x I on the w block.
        let s = Subsystem::new(
            gain(1, 1, 0.5),
            gain(1, 1, 0.0),
            gain(1, 1, 0.7),
            gain(1, 1, 0.2),
            IqcMultiplierSpec::parametric_scalar(1),
        )
        .unwrap();
        let sys = InterconnectedSystem::new(
            vec![s.clone(), s],
            InterconnectionMatrix::zero(vec![1, 1], vec![1, 1]).unwrap(),
        )
        .unwrap();
        let f = sparse_affine(&sys, Frequency::Finite(2.0)).unwrap();
        assert_eq!(f.hermitian_order, 4);
        let x_term = f.coefficients[2].to_dense();
        let mut expect = DMatrix::zeros(8, 8);
        for k in [2, 3, 6, 7] {
            expect[(k, k)] = -1.0;
        }
        assert_eq!(x_term, expect);
        // r_1 touches only q_1 (coordinates 0 and 4 after embedding).
        for &(r, c, _) in f.coefficients[0].entries() {
            assert!([0, 4].contains(&r) && [0, 4].contains(&c));
        }
    }

    #[test]
    fn bounds_and_labels() {
        let p = lumped_lmi(&isolated(0.5), Frequency::Infinity).unwrap();
        assert_eq!(p.labels(), &["r1".to_string()]);
        assert_eq!(p.bounds(), &[Some(VariableBounds::UNIT)]);
        assert!((p.epsilon() - 1e-6 * 1.75).abs() < 1e-18);
        assert_eq!(p.frequency(), Some(Frequency::Infinity));
    }
}
