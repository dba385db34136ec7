use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::{InterconnectionMatrix, IqcMultiplierSpec, ModelError, Subsystem};
use crate::lti::{sigma_max, sigma_min, Frequency, FrequencyGrid, LtiError};

type C64 = Complex<f64>;

/// `sigma_min(I - Gamma G_zw)` must exceed this for well-posedness.
const WELL_POSED_TOL: f64 = 1e-9;

/// The four block responses of one subsystem at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsystemResponse {
    pub pq: DMatrix<C64>,
    pub pw: DMatrix<C64>,
    pub zq: DMatrix<C64>,
    pub zw: DMatrix<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Wire")]
pub struct InterconnectedSystem {
    subsystems: Vec<Subsystem>,
    interconnection: InterconnectionMatrix,
}

#[derive(Deserialize)]
struct Wire {
    subsystems: Vec<Subsystem>,
    interconnection: InterconnectionMatrix,
}

impl TryFrom<Wire> for InterconnectedSystem {
    type Error = ModelError;

    fn try_from(w: Wire) -> Result<Self, ModelError> {
        InterconnectedSystem::new(w.subsystems, w.interconnection)
    }
}

impl InterconnectedSystem {
    pub fn new(
        subsystems: Vec<Subsystem>,
        interconnection: InterconnectionMatrix,
    ) -> Result<Self, ModelError> {
        if subsystems.is_empty() {
            return Err(ModelError::DimensionMismatch("no subsystems".into()));
        }
        if interconnection.blocks() != subsystems.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "{} subsystems but Gamma has {} blocks",
                subsystems.len(),
                interconnection.blocks()
            )));
        }
        for (i, s) in subsystems.iter().enumerate() {
            let (m, l) = (
                interconnection.row_blocks()[i],
                interconnection.col_blocks()[i],
            );
            if s.m() != m || s.l() != l {
                return Err(ModelError::DimensionMismatch(format!(
                    "subsystem {i} has m = {}, l = {} but Gamma partition gives {m}, {l}",
                    s.m(),
                    s.l()
                )));
            }
        }
        Ok(Self {
            subsystems,
            interconnection,
        })
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn interconnection(&self) -> &InterconnectionMatrix {
        &self.interconnection
    }

    /// Same interconnection with replaced subsystems.
    pub fn with_subsystems(&self, subsystems: Vec<Subsystem>) -> Result<Self, ModelError> {
        Self::new(subsystems, self.interconnection.clone())
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    /// `d-bar`, total uncertainty channels.
    pub fn total_d(&self) -> usize {
        self.subsystems.iter().map(Subsystem::d).sum()
    }

    /// `m-bar`, total interconnection inputs.
    pub fn total_m(&self) -> usize {
        self.interconnection.rows()
    }

    /// `l-bar`, total interconnection outputs.
    pub fn total_l(&self) -> usize {
        self.interconnection.cols()
    }

    /// Offsets of each subsystem's uncertainty channels; length `N + 1`.
    pub fn d_offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for s in &self.subsystems {
            o.push(o.last().unwrap() + s.d());
        }
        o
    }

    pub fn specs(&self) -> Vec<IqcMultiplierSpec> {
        self.subsystems.iter().map(Subsystem::uncertainty).collect()
    }

    pub fn responses(&self, w: Frequency) -> Result<Vec<SubsystemResponse>, LtiError> {
        self.subsystems
            .iter()
            .map(|s| {
                Ok(SubsystemResponse {
                    pq: s.g_pq().response(w)?,
                    pw: s.g_pw().response(w)?,
                    zq: s.g_zq().response(w)?,
                    zw: s.g_zw().response(w)?,
                })
            })
            .collect()
    }

    /// Dense `Gamma G_zw` (order `m-bar`).
    pub fn loop_gain(&self, resp: &[SubsystemResponse]) -> DMatrix<C64> {
        self.gamma_times(resp, |r| &r.zw, self.interconnection.row_offsets())
    }

    /// Dense `Gamma G_zq` (`m-bar` by `d-bar`).
    pub fn gamma_g_zq(&self, resp: &[SubsystemResponse]) -> DMatrix<C64> {
        self.gamma_times(resp, |r| &r.zq, &self.d_offsets())
    }

    fn gamma_times(
        &self,
        resp: &[SubsystemResponse],
        block: impl Fn(&SubsystemResponse) -> &DMatrix<C64>,
        col_offsets: &[usize],
    ) -> DMatrix<C64> {
        let g = &self.interconnection;
        let mut out = DMatrix::zeros(g.rows(), *col_offsets.last().unwrap());
        for (r, c) in g.entries() {
            let (j, b) = g.col_owner(c);
            let src = block(&resp[j]);
            for k in 0..src.ncols() {
                out[(r, col_offsets[j] + k)] = src[(b, k)];
            }
        }
        out
    }

    /// `sigma_max(Gamma) * max_i sigma_max(G^i_zw)`, an upper bound on
    /// `sigma_max(Gamma G_zw)`.
    pub fn small_gain_bound(&self, resp: &[SubsystemResponse]) -> f64 {
        let worst = resp.iter().map(|r| sigma_max(&r.zw)).fold(0.0, f64::max);
        self.interconnection.gamma() * worst
    }
}

/// True iff `I - Gamma G_zw(jw)` stays uniformly invertible on the grid.
///
/// Uses `sigma_min(I - M) >= 1 - sigma_max(M)` with the small-gain bound
/// first; the singular value decomposition runs only when that is inconclusive.
pub fn well_posed(sys: &InterconnectedSystem, grid: &FrequencyGrid) -> bool {
    grid.iter().all(|w| {
        let Ok(resp) = sys.responses(w) else {
            return false;
        };
        if 1.0 - sys.small_gain_bound(&resp) > WELL_POSED_TOL {
            return true;
        }
        let m = sys.loop_gain(&resp);
        let n = m.nrows();
        let i_minus = DMatrix::<C64>::identity(n, n) - m;
        sigma_min(&i_minus) > WELL_POSED_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::StateSpaceSystem;
    use crate::model::{chain_interconnection, IqcMultiplierSpec};

    fn gain(p: usize, m: usize, v: f64) -> StateSpaceSystem {
        StateSpaceSystem::static_gain(DMatrix::from_element(p, m, v))
    }

    fn scalar_loop(zw: f64) -> InterconnectedSystem {
        let s = Subsystem::new(
            gain(1, 1, 0.0),
            gain(1, 1, 1.0),
            gain(1, 1, 1.0),
            gain(1, 1, zw),
            IqcMultiplierSpec::parametric_scalar(1),
        )
        .unwrap();
        let g = InterconnectionMatrix::new(vec![1], vec![1], [(0, 0)]).unwrap();
        InterconnectedSystem::new(vec![s], g).unwrap()
    }

    #[test]
    fn unit_static_loop_is_ill_posed() {
        let grid = FrequencyGrid::default_analysis();
        assert!(!well_posed(&scalar_loop(1.0), &grid));
        assert!(well_posed(&scalar_loop(0.5), &grid));
        // Gain above one but away from the singular point.
        assert!(well_posed(&scalar_loop(3.0), &grid));
    }

    #[test]
    fn zero_gamma_is_well_posed() {
        let s = Subsystem::new(
            gain(1, 1, 0.0),
            gain(1, 1, 1.0),
            gain(1, 1, 1.0),
            gain(1, 1, 1.0),
            IqcMultiplierSpec::parametric_scalar(1),
        )
        .unwrap();
        let g = InterconnectionMatrix::zero(vec![1], vec![1]).unwrap();
        let sys = InterconnectedSystem::new(vec![s], g).unwrap();
        assert!(well_posed(&sys, &FrequencyGrid::default_analysis()));
    }

    #[test]
    fn partition_mismatch_is_rejected() {
        let s = Subsystem::new(
            gain(1, 1, 0.0),
            gain(1, 1, 1.0),
            gain(1, 1, 1.0),
            gain(1, 1, 0.0),
            IqcMultiplierSpec::parametric_scalar(1),
        )
        .unwrap();
        let g = chain_interconnection(3).unwrap();
        assert!(InterconnectedSystem::new(vec![s.clone(), s.clone(), s], g).is_err());
    }
}
