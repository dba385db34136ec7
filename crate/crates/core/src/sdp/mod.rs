//! Margin-form interior-point solver for `sum_i y_i Q_i + S = W, S >= 0`.
//!
//! The solver computes `t* = sup { t : W - sum_i y_i Q_i - t I >= 0 }` over
//! the box-constrained `y`, following the central path of
//!
//! `phi_k(y, t) = -k t - log det S(y, t) - sum log(bound slacks)`
//!
//! with damped Newton steps and a geometric increase of `k`. Every iterate is
//! strictly feasible, so the returned `t` is attained and `t > 0` certifies the
//! LMI. The slack matrix is factored either densely or by sparse Cholesky on
//! the aggregate pattern after a minimum-degree ordering.

mod barrier;
mod newton;
mod solver;

pub use barrier::barrier;
pub use newton::{assemble_newton, assemble_newton_dense, NewtonSystem};
pub use solver::solve_margin;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::SparseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPath {
    Dense,
    Sparse,
    /// Sparse when the aggregate density is below the threshold.
    Auto,
}

impl std::str::FromStr for SolverPath {
    type Err = SdpError;

    fn from_str(s: &str) -> Result<Self, SdpError> {
        match s {
            "dense" => Ok(SolverPath::Dense),
            "sparse" => Ok(SolverPath::Sparse),
            "auto" => Ok(SolverPath::Auto),
            _ => Err(SdpError::InvalidOptions(format!(
                "unknown solver path {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for SolverPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverPath::Dense => "dense",
            SolverPath::Sparse => "sparse",
            SolverPath::Auto => "auto",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Cap on Newton steps across all barrier parameter values.
    pub max_iterations: usize,
    /// Stop once the duality gap bound `nu / k` is below
    /// `gap_tolerance * max(1, |t|)`.
    pub gap_tolerance: f64,
    /// Multiplies the default starting shift `t0 = -(1 + |M|_max) n`.
    pub initial_scale: f64,
    pub path: SolverPath,
    /// Density below which `Auto` picks the sparse path.
    pub auto_density_threshold: f64,
    /// Factor applied to the barrier weight after each centering.
    pub barrier_growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gap_tolerance: 1e-8,
            initial_scale: 1.0,
            path: SolverPath::Auto,
            auto_density_threshold: 0.1,
            barrier_growth: 50.0,
        }
    }
}

impl SolverOptions {
    pub fn with_path(mut self, path: SolverPath) -> Self {
        self.path = path;
        self
    }

    fn validate(&self) -> Result<(), SdpError> {
        let ok = self.gap_tolerance > 0.0
            && self.initial_scale > 0.0
            && self.barrier_growth > 1.0
            && self.max_iterations > 0
            && (0.0..=1.0).contains(&self.auto_density_threshold);
        if ok {
            Ok(())
        } else {
            Err(SdpError::InvalidOptions(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    MarginFound,
    NumericalFailure,
    IterationLimit,
    /// `t` grew without bound: some `y` in the box makes `sum y_i Q_i`
    /// negative definite.
    Unbounded,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::MarginFound => "margin_found",
            SolveStatus::NumericalFailure => "numerical_failure",
            SolveStatus::IterationLimit => "iteration_limit",
            SolveStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub kappa: f64,
    pub barrier: f64,
    pub decrement: f64,
    pub step: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillStats {
    pub order: usize,
    pub input_nnz: usize,
    pub filled_nnz: usize,
    pub fill_count: usize,
    pub fill_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Margin of the last iterate; `W - sum y_i Q_i - t I` is positive
    /// definite there.
    pub t: f64,
    pub y: Vec<f64>,
    pub iterations: usize,
    /// Duality gap bound `nu / k` at termination.
    pub gap: f64,
    /// Scaled Newton decrement `lambda / k`, the stationarity residual of the
    /// last centering.
    pub kkt_residual: f64,
    pub path: SolverPath,
    pub fill: Option<FillStats>,
    pub log: Vec<IterationLog>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}
