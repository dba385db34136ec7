use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::lti::StateSpaceSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    /// `Pi = diag(r I, -r I)` with a scalar `r >= 0` per frequency: a real
    /// parametric uncertainty of gain at most one.
    ParametricScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IqcMultiplierSpec {
    pub kind: MultiplierKind,
    /// Uncertainty channel dimension `d_i`.
    pub dim: usize,
}

impl IqcMultiplierSpec {
    pub fn parametric_scalar(dim: usize) -> Self {
        Self {
            kind: MultiplierKind::ParametricScalar,
            dim,
        }
    }
}

/// Subsystem `(p, z) = [[G_pq, G_pw], [G_zq, G_zw]] (q, w)` with
/// `d` uncertainty channels, `m` interconnection inputs and `l` outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubsystemWire")]
pub struct Subsystem {
    g_pq: StateSpaceSystem,
    g_pw: StateSpaceSystem,
    g_zq: StateSpaceSystem,
    g_zw: StateSpaceSystem,
    uncertainty: IqcMultiplierSpec,
}

#[derive(Deserialize)]
struct SubsystemWire {
    g_pq: StateSpaceSystem,
    g_pw: StateSpaceSystem,
    g_zq: StateSpaceSystem,
    g_zw: StateSpaceSystem,
    uncertainty: IqcMultiplierSpec,
}

impl TryFrom<SubsystemWire> for Subsystem {
    type Error = ModelError;

    fn try_from(w: SubsystemWire) -> Result<Self, ModelError> {
        Subsystem::new(w.g_pq, w.g_pw, w.g_zq, w.g_zw, w.uncertainty)
    }
}

impl Subsystem {
    pub fn new(
        g_pq: StateSpaceSystem,
        g_pw: StateSpaceSystem,
        g_zq: StateSpaceSystem,
        g_zw: StateSpaceSystem,
        uncertainty: IqcMultiplierSpec,
    ) -> Result<Self, ModelError> {
        let d = g_pq.outputs();
        let m = g_pw.inputs();
        let l = g_zq.outputs();
        let shape = |s: &StateSpaceSystem| (s.outputs(), s.inputs());
        let ok = shape(&g_pq) == (d, d)
            && shape(&g_pw) == (d, m)
            && shape(&g_zq) == (l, d)
            && shape(&g_zw) == (l, m)
            && uncertainty.dim == d;
        if !ok {
            return Err(ModelError::DimensionMismatch(format!(
                "blocks pq {:?}, pw {:?}, zq {:?}, zw {:?}, uncertainty dim {}",
                shape(&g_pq),
                shape(&g_pw),
                shape(&g_zq),
                shape(&g_zw),
                uncertainty.dim
            )));
        }
        Ok(Self {
            g_pq,
            g_pw,
            g_zq,
            g_zw,
            uncertainty,
        })
    }

    pub fn g_pq(&self) -> &StateSpaceSystem {
        &self.g_pq
    }

    pub fn g_pw(&self) -> &StateSpaceSystem {
        &self.g_pw
    }

    pub fn g_zq(&self) -> &StateSpaceSystem {
        &self.g_zq
    }

    pub fn g_zw(&self) -> &StateSpaceSystem {
        &self.g_zw
    }

    pub fn uncertainty(&self) -> IqcMultiplierSpec {
        self.uncertainty
    }

    /// Uncertainty channel count.
    pub fn d(&self) -> usize {
        self.g_pq.outputs()
    }

    /// Interconnection input count.
    pub fn m(&self) -> usize {
        self.g_pw.inputs()
    }

    /// Interconnection output count.
    pub fn l(&self) -> usize {
        self.g_zq.outputs()
    }

    /// Iterates over the four blocks in the order pq, pw, zq, zw.
    pub fn blocks(&self) -> [&StateSpaceSystem; 4] {
        [&self.g_pq, &self.g_pw, &self.g_zq, &self.g_zw]
    }

    pub fn with_g_pq(&self, g_pq: StateSpaceSystem) -> Result<Self, ModelError> {
        Self::new(
            g_pq,
            self.g_pw.clone(),
            self.g_zq.clone(),
            self.g_zw.clone(),
            self.uncertainty,
        )
    }

    pub fn with_g_zw(&self, g_zw: StateSpaceSystem) -> Result<Self, ModelError> {
        Self::new(
            self.g_pq.clone(),
            self.g_pw.clone(),
            self.g_zq.clone(),
            g_zw,
            self.uncertainty,
        )
    }
}
