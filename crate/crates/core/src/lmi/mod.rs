//! Per-frequency robustness LMIs in the standard form
//! `sum_i y_i Q_i + S = W, S >= 0`.
//!
//! Both builders produce a homogeneous Hermitian LMI `F(y) <= -eps I` in the
//! multiplier variables, embed it as a real symmetric LMI of twice the order,
//! and then move the constant to the right-hand side. Every variable gets the
//! box `[0, 1]`: scaling a feasible homogeneous multiplier keeps it feasible,
//! so the box only normalizes the margin without changing the verdict.

mod builder;
mod certificate;
mod embed;
mod problem;
mod sdpa;

pub use builder::{lumped_affine, lumped_lmi, sparse_affine, sparse_lmi};
pub use certificate::{FrequencyRecord, StabilityCertificate, Verdict};
pub use embed::{real_embed, HermitianAccumulator};
pub use problem::{
    default_epsilon, to_dual_form, AffineLmi, SdpFeasibilityProblem, VariableBounds,
};
pub use sdpa::{export_sdpa, read_sdpa, write_sdpa, SdpaData};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::LtiError;
use crate::model::ModelError;
use crate::sparse::SparseError;

/// Which of the two equivalent formulations to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LmiForm {
    /// Multiplier condition on the closed-loop map from `q` to `p`.
    Lumped,
    /// Interconnection kept as a quadratic constraint with scaling `x I`.
    Sparse,
}

impl std::fmt::Display for LmiForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LmiForm::Lumped => "lumped",
            LmiForm::Sparse => "sparse",
        })
    }
}

impl std::str::FromStr for LmiForm {
    type Err = LmiError;

    fn from_str(s: &str) -> Result<Self, LmiError> {
        match s {
            "lumped" => Ok(LmiForm::Lumped),
            "sparse" => Ok(LmiForm::Sparse),
            _ => Err(LmiError::Parse(format!("unknown LMI form {s:?}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum LmiError {
    #[error(transparent)]
    Lti(#[from] LtiError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("SDPA parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
