//! Seeded benchmark instances: chains and scale-free trees of first-order
//! subsystems, rescaled for small gain and checked before they are returned.
//!
//! Instance `k` of a configuration draws from its own ChaCha8 stream (`seed`,
//! stream `k`), so instances are independent of generation order and can be
//! produced in parallel.

mod conditions;
mod scale_free;
mod subsystem;

pub use conditions::{verify_conditions, Condition3Method, ConditionReport};
pub use scale_free::{sample_scale_free, truncated_power_law, DegreeSequence};
pub use subsystem::{first_order_block, gen_subsystem, rescale_small_gain, Rescaled};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{FrequencyGrid, LtiError};
use crate::model::{
    build_interconnection, chain_interconnection, well_posed, AdjacencyMatrix,
    InterconnectedSystem, ModelError,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Chain,
    /// Tree with power-law degree distribution `P(k) ~ k^-alpha`.
    ScaleFree {
        alpha: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Number of subsystems.
    pub n: usize,
    pub topology: Topology,
    pub seed: u64,
    /// Interval of the real poles of the first-order entries.
    #[serde(default = "default_pole_range")]
    pub pole_range: [f64; 2],
    #[serde(default = "default_gain_range")]
    pub gain_range: [f64; 2],
    /// Grid on which the per-subsystem IQC condition and well-posedness are
    /// checked.
    #[serde(default = "FrequencyGrid::default_analysis")]
    pub grid: FrequencyGrid,
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Uncertainty channels per subsystem.
    #[serde(default = "default_uncertainty_dim")]
    pub uncertainty_dim: usize,
}

fn default_pole_range() -> [f64; 2] {
    [-5.0, -0.1]
}

fn default_gain_range() -> [f64; 2] {
    [-2.0, 2.0]
}

fn default_instances() -> usize {
    1
}

fn default_uncertainty_dim() -> usize {
    1
}

impl GeneratorConfig {
    pub fn chain(n: usize, seed: u64) -> Self {
        Self {
            n,
            topology: Topology::Chain,
            seed,
            pole_range: default_pole_range(),
            gain_range: default_gain_range(),
            grid: FrequencyGrid::default_analysis(),
            instances: default_instances(),
            uncertainty_dim: default_uncertainty_dim(),
        }
    }

    pub fn scale_free(n: usize, alpha: f64, seed: u64) -> Self {
        Self {
            topology: Topology::ScaleFree { alpha },
            ..Self::chain(n, seed)
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |msg: String| Err(GenerateError::InvalidConfig(msg));
        let [plo, phi] = self.pole_range;
        let [glo, ghi] = self.gain_range;
        match self.topology {
            Topology::Chain if self.n < 2 => {
                return bad(format!("chain needs n >= 2, got {}", self.n))
            }
            Topology::ScaleFree { alpha } if !(alpha > 1.0) => {
                return bad(format!("scale-free exponent must exceed 1, got {alpha}"))
            }
            Topology::ScaleFree { .. } if self.n < 2 => {
                return bad(format!("scale-free network needs n >= 2, got {}", self.n))
            }
            _ => {}
        }
        if !(plo.is_finite() && plo <= phi && phi < 0.0) {
            return bad(format!(
                "pole range {:?} must be finite, ordered and negative",
                self.pole_range
            ));
        }
        if !(glo.is_finite() && ghi.is_finite() && glo <= ghi) {
            return bad(format!(
                "gain range {:?} must be finite and ordered",
                self.gain_range
            ));
        }
        if self.uncertainty_dim == 0 {
            return bad("uncertainty_dim must be positive".into());
        }
        if self.grid.is_empty() {
            return bad("empty grid".into());
        }
        Ok(())
    }

    /// RNG of instance `index`.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedInstance {
    pub index: usize,
    pub adjacency: AdjacencyMatrix,
    pub system: InterconnectedSystem,
    /// Output scaling applied to each `G_zw`; 1 where none was needed.
    pub rescale_factors: Vec<f64>,
    pub report: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("no subsystem satisfied the IQC condition after {attempts} attempts")]
    GenerationExhausted { attempts: usize },
    #[error("generated instance failed its checks: {0}")]
    ChecksFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

/// Instance `index` of `config`: topology, subsystems, small-gain rescaling
/// and the full condition check. Fails rather than return an instance that
/// violates a condition or is ill-posed on the grid.
pub fn generate_instance(
    config: &GeneratorConfig,
    index: usize,
) -> Result<GeneratedInstance, GenerateError> {
    config.validate()?;
    let mut rng = config.rng(index);
    let (adjacency, gamma) = match config.topology {
        Topology::Chain => (
            AdjacencyMatrix::path(config.n),
            chain_interconnection(config.n)?,
        ),
        Topology::ScaleFree { alpha } => {
            let adj = scale_free::sample_tree(config.n, alpha, &mut rng);
            let gamma = build_interconnection(&adj);
            (adj, gamma)
        }
    };
    let mut subsystems = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let (m, l) = (gamma.row_blocks()[i], gamma.col_blocks()[i]);
        subsystems.push(gen_subsystem(
            config.uncertainty_dim,
            m,
            l,
            config,
            &mut rng,
        )?);
    }
    let Rescaled {
        subsystems,
        factors,
    } = rescale_small_gain(&subsystems, &gamma)?;
    let system = InterconnectedSystem::new(subsystems, gamma)?;
    let report = verify_conditions(&system, &config.grid);
    if !report.all_pass() {
        return Err(GenerateError::ChecksFailed(report.summary()));
    }
    if !well_posed(&system, &config.grid) {
        return Err(GenerateError::ChecksFailed(
            "interconnection is ill-posed on the grid".into(),
        ));
    }
    Ok(GeneratedInstance {
        index,
        adjacency,
        system,
        rescale_factors: factors,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::chain(5, 1).validate().is_ok());
        assert!(GeneratorConfig::chain(1, 1).validate().is_err());
        assert!(GeneratorConfig::scale_free(10, 0.5, 1).validate().is_err());
        let mut c = GeneratorConfig::chain(5, 1);
        c.pole_range = [-1.0, 0.5];
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let c: GeneratorConfig = serde_json::from_str(
            r#"{"n": 4, "topology": {"kind": "scale_free", "alpha": 2.5}, "seed": 9}"#,
        )
        .unwrap();
        let expect = GeneratorConfig::scale_free(4, 2.5, 9);
        assert_eq!(
            (c.n, c.topology, c.seed, c.instances),
            (expect.n, expect.topology, expect.seed, 1)
        );
        assert_eq!(c.grid.len(), expect.grid.len());
        let back: GeneratorConfig =
            serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn chain_instance_is_deterministic_and_valid() {
        let c = GeneratorConfig::chain(5, 42);
        let a = generate_instance(&c, 0).unwrap();
        let b = generate_instance(&c, 0).unwrap();
        assert_eq!(a, b);
        assert!(a.report.all_pass());
        assert_eq!(a.system.total_d(), 5);
        assert_eq!(a.system.total_m(), 8);
        let other = generate_instance(&c, 1).unwrap();
        assert_ne!(a.system, other.system);
    }

    #[test]
    fn scale_free_instance_is_a_tree() {
        let c = GeneratorConfig::scale_free(30, 2.5, 7);
        let inst = generate_instance(&c, 3).unwrap();
        assert!(inst.adjacency.is_tree());
        assert_eq!(inst.system.total_m(), 2 * 29);
    }
}
