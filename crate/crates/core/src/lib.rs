//! Robust stability analysis of sparsely interconnected uncertain systems.
//!
//! The crate builds frequency-gridded IQC feasibility LMIs for networks of
//! uncertain LTI subsystems, either on the lumped closed-loop transfer matrix or
//! in a sparse form that keeps the interconnection as an explicit quadratic
//! constraint, and decides them with a barrier-method SDP solver that can factor
//! the slack matrix with a sparse Cholesky on its aggregate pattern.
//!
//! Modules, bottom-up:
//! - [`sparse`]: patterns, minimum-degree ordering, symbolic/numeric Cholesky.
//! - [`lti`]: state-space systems, frequency responses, H-infinity norm estimates.
//! - [`model`]: subsystems, interconnection matrices, multipliers.
//! - [`lmi`]: lumped and sparse LMI construction, SDPA export, certificates.
//! - [`sdp`]: the margin-form interior-point solver.
//! - [`generate`]: chain and scale-free benchmark instances.
//! - [`analysis`]: per-frequency solves collected into a certificate.

// `!(x > 0.0)` style tests are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod generate;
pub mod lmi;
pub mod lti;
pub mod model;
pub mod sdp;
pub mod sparse;
