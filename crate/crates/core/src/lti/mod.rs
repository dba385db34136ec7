//! Continuous-time LTI systems in state-space form.
//!
//! Responses are evaluated per frequency; `Frequency::Infinity` is symbolic and
//! always returns the feedthrough `D`. The H-infinity estimate is a grid sweep
//! refined by golden-section search, so it is a lower bound on the true norm.

mod grid;
mod lumped;
mod norm;
mod system;

pub use grid::{Frequency, FrequencyGrid};
pub use lumped::{lumped_response, lumped_state_matrix};
pub use norm::{hinf_norm, hinf_norm_default, sigma_max, sigma_min};
pub use system::{block_diag, is_hurwitz, FrequencyResponse, StateMatrix, StateSpaceSystem};

pub(crate) use lumped::lumped_from_responses;
pub(crate) use system::C64;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LtiError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("resolvent is singular at omega = {omega}")]
    SingularResolvent { omega: f64 },
    #[error("system is not Hurwitz stable")]
    UnstableSystem,
    #[error("interconnection is ill-posed at omega = {omega}")]
    IllPosedInterconnection { omega: Frequency },
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("empty system list")]
    Empty,
}
