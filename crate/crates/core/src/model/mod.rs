//! Networks of uncertain subsystems.
//!
//! Subsystem `i` maps `(q^i, w^i)` to `(p^i, z^i)` through four transfer blocks
//! and is closed by an uncertainty `q^i = delta^i p^i` that is only ever described by
//! its multiplier. Subsystems talk through `w = Gamma z` where `Gamma` is a 0-1
//! matrix with at most one nonzero per row.

mod graph;
mod interconnection;
mod multiplier;
mod network;
mod subsystem;

pub use graph::{build_interconnection, chain_interconnection, AdjacencyMatrix};
pub use interconnection::InterconnectionMatrix;
pub use multiplier::{diag_multiplier, BlockMultiplier};
pub use network::{well_posed, InterconnectedSystem, SubsystemResponse};
pub use subsystem::{IqcMultiplierSpec, MultiplierKind, Subsystem};

use thiserror::Error;

use crate::lti::LtiError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid interconnection: {0}")]
    InvalidInterconnection(String),
    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),
    #[error("chain needs at least 2 subsystems, got {0}")]
    ChainTooShort(usize),
    #[error("multiplier value r[{index}] = {value} is negative")]
    NegativeMultiplier { index: usize, value: f64 },
    #[error(transparent)]
    Lti(#[from] LtiError),
}
