//! Score matrices for linear rank statistics.
//!
//! A linear rank statistic has the form `T = a_{1,pi(1)} + ... + a_{n,pi(n)}`
//! where `pi` is a uniformly random permutation of `{1, ..., n}` and
//! `A = (a_ij)` is an `n x n` score matrix. Everything about the distribution
//! of `T` that matters for normal and Edgeworth approximation is a functional
//! of the standardized matrix, obtained by double centering `A` and dividing
//! by the permutation standard deviation of `T`.
//!
//! This crate provides:
//!
//! * [`ScoreMatrix`]: an immutable matrix with cached means, variance and
//!   standardized entries ([`build_matrix`], [`build_product_matrix`]);
//! * [`MatrixMoments`]: the absolute-moment sums and the two expansion
//!   coefficients `lambda1`, `lambda2` ([`moments`]);
//! * [`submatrix`]: deletion of matched row/column sets with fresh statistics;
//! * [`truncate`]: the entry-truncation at 1/2 used to reduce general
//!   matrices to bounded-entry ones, together with its bookkeeping
//!   ([`TruncatedTriple`]).
//!
//! All values are plain `f64`; a matrix with zero variance is reported as a
//! [`MatrixError::Degenerate`] error by every operation that needs
//! standardized entries, never as a silent NaN.

mod moments;
mod score;
mod truncate;

pub use moments::{moments, MatrixMoments};
pub use score::{build_matrix, build_product_matrix, submatrix, ScoreMatrix, SubmatrixSelector};
pub use truncate::{truncate, TruncatedTriple};

use thiserror::Error;

/// Errors from matrix construction and derived computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    /// The input grid has no rows.
    #[error("matrix must have at least one row")]
    Empty,
    /// A row length disagrees with the number of rows.
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },
    /// A flat entry buffer has the wrong length for the requested size.
    #[error("expected {expected} entries for an {n} x {n} matrix, got {got}")]
    WrongLength { n: usize, expected: usize, got: usize },
    /// An entry is NaN or infinite.
    #[error("entry at row {i}, column {j} is not finite")]
    NonFinite { i: usize, j: usize },
    /// Regression coefficients and scores differ in length.
    #[error("regression coefficients ({regression}) and scores ({scores}) differ in length")]
    LengthMismatch { regression: usize, scores: usize },
    /// The matrix has zero variance, so standardized entries are undefined.
    #[error("degenerate matrix: sigma^2 = 0, standardized entries are undefined")]
    Degenerate,
    /// A selector cancels a different number of rows than columns.
    #[error("selector cancels {rows} rows but {cols} columns; counts must match")]
    SelectorUnbalanced { rows: usize, cols: usize },
    /// Selector indices are not strictly increasing.
    #[error("selector indices must be strictly increasing")]
    SelectorNotIncreasing,
    /// A selector index does not fit the matrix it is applied to.
    #[error("selector index {index} is out of range for an n = {n} matrix")]
    SelectorOutOfRange { index: usize, n: usize },
    /// A selector would cancel every row and column.
    #[error("selector cancels {l} of {n} rows and columns; at least one must remain")]
    SelectorTooLarge { l: usize, n: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn shared_types_are_send_sync() {
        assert_send_sync::<ScoreMatrix>();
        assert_send_sync::<MatrixMoments>();
        assert_send_sync::<TruncatedTriple>();
        assert_send_sync::<MatrixError>();
    }
}
