use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{GenerateError, GeneratorConfig};
use crate::lti::{hinf_norm_default, sigma_max, FrequencyGrid, StateSpaceSystem};
use crate::model::{InterconnectionMatrix, IqcMultiplierSpec, Subsystem};

const MAX_ATTEMPTS: usize = 100;
/// Target `gamma * |G_zw|` after rescaling.
const SMALL_GAIN_CUSHION: f64 = 0.9;

/// `outputs x inputs` transfer matrix whose entries are independent
/// `k a / (s + a)` with `-a` drawn from `pole_range` and `k` from
/// `gain_range`, in row-major order (pole, then gain). Realized with one
/// state per entry, so `A` is diagonal and Hurwitz.
pub fn first_order_block<R: Rng>(
    outputs: usize,
    inputs: usize,
    pole_range: [f64; 2],
    gain_range: [f64; 2],
    rng: &mut R,
) -> StateSpaceSystem {
    let states = outputs * inputs;
    let mut a = DVector::zeros(states);
    let mut b = DMatrix::zeros(states, inputs);
    let mut c = DMatrix::zeros(outputs, states);
    for i in 0..outputs {
        for j in 0..inputs {
            let s = i * inputs + j;
            let pole = rng.gen_range(pole_range[0]..=pole_range[1]);
            let gain = rng.gen_range(gain_range[0]..=gain_range[1]);
            a[s] = pole;
            b[(s, j)] = 1.0;
            c[(i, s)] = -gain * pole;
        }
    }
    StateSpaceSystem::with_diagonal(a, b, c, DMatrix::zeros(outputs, inputs))
        .expect("shapes agree by construction")
}

/// Whether `r (G^H G - I) < 0` is solvable with `r >= 0` at every grid
/// point, i.e. `sigma_max(G_pq) < 1` on the grid.
pub(crate) fn iqc_condition_holds(g_pq: &StateSpaceSystem, grid: &FrequencyGrid) -> bool {
    grid.iter().all(|w| {
        g_pq.response(w)
            .map(|g| sigma_max(&g) < 1.0)
            .unwrap_or(false)
    })
}

/// Subsystem with `d` uncertainty channels, `m` interconnection inputs and
/// `l` outputs, all four blocks drawn by [`first_order_block`]. Draws are
/// repeated until `G_pq` passes the IQC condition on `config.grid`.
pub fn gen_subsystem<R: Rng>(
    d: usize,
    m: usize,
    l: usize,
    config: &GeneratorConfig,
    rng: &mut R,
) -> Result<Subsystem, GenerateError> {
    let (poles, gains) = (config.pole_range, config.gain_range);
    for _ in 0..MAX_ATTEMPTS {
        let g_pq = first_order_block(d, d, poles, gains, rng);
        let g_pw = first_order_block(d, m, poles, gains, rng);
        let g_zq = first_order_block(l, d, poles, gains, rng);
        let g_zw = first_order_block(l, m, poles, gains, rng);
        if iqc_condition_holds(&g_pq, &config.grid) {
            return Ok(Subsystem::new(
                g_pq,
                g_pw,
                g_zq,
                g_zw,
                IqcMultiplierSpec::parametric_scalar(d),
            )?);
        }
    }
    Err(GenerateError::GenerationExhausted {
        attempts: MAX_ATTEMPTS,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rescaled {
    pub subsystems: Vec<Subsystem>,
    pub factors: Vec<f64>,
}

/// Scales the output of every `G^i_zw` with `gamma |G^i_zw| >= 1` by
/// `0.9 / (gamma |G^i_zw|)`, where `gamma = sigma_max(Gamma)`. Afterwards
/// `gamma |G^i_zw| <= 0.9` for all `i`, so the loop is stable by small gain.
pub fn rescale_small_gain(
    subsystems: &[Subsystem],
    gamma: &InterconnectionMatrix,
) -> Result<Rescaled, GenerateError> {
    let g = gamma.gamma();
    let mut out = Vec::with_capacity(subsystems.len());
    let mut factors = Vec::with_capacity(subsystems.len());
    for s in subsystems {
        let norm = if g > 0.0 {
            hinf_norm_default(s.g_zw())?
        } else {
            0.0
        };
        if g * norm >= 1.0 {
            let alpha = SMALL_GAIN_CUSHION / (g * norm);
            out.push(s.with_g_zw(s.g_zw().scale_output(alpha))?);
            factors.push(alpha);
        } else {
            out.push(s.clone());
            factors.push(1.0);
        }
    }
    Ok(Rescaled {
        subsystems: out,
        factors,
    })
}
