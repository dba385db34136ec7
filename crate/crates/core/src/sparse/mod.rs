//! Sparse symmetric storage, minimum-degree ordering and simplicial Cholesky.
//!
//! The pipeline is the usual one: take the aggregate [`SparsityPattern`] of a
//! matrix family, pick a fill-reducing [`Permutation`] with
//! [`min_degree_order`], compute the filled structure once with
//! [`symbolic_factor`], then call [`cholesky`] for each numeric matrix on that
//! pattern. A failed pivot is reported as [`SparseError::NotPositiveDefinite`],
//! which callers probing the PSD cone treat as "outside" rather than fatal.

mod cholesky;
mod matrix;
mod ordering;
mod pattern;
mod permutation;
mod symbolic;

pub use cholesky::{cholesky, cholesky_on_pattern, CholeskyFactor};
pub use matrix::SymSparse;
pub use ordering::min_degree_order;
pub use pattern::SparsityPattern;
pub use permutation::Permutation;
pub use symbolic::{symbolic_factor, SymbolicFactor};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SparseError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for order {order}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        order: usize,
    },
    #[error("not a permutation")]
    InvalidPermutation,
    #[error("entry ({row}, {col}) is not on the factor's input pattern")]
    PatternMismatch { row: usize, col: usize },
    #[error("matrix is not positive definite (failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
}
