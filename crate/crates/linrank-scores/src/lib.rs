//! Score sequences for linear rank statistics.
//!
//! A score function `J: (0, 1) -> R` is turned into a score sequence either
//! by evaluating it at the grid `j / (n + 1)` (approximating scores) or by
//! averaging it against the density of the `j`-th uniform order statistic
//! (exact scores). The crate ships the three classical families (Wilcoxon,
//! van der Waerden, median), a checker for the weighted-derivative growth
//! condition that controls score smoothness, and a checker for the
//! spread-and-separation conditions on regression constants and scores that
//! drive the Edgeworth error rates.

mod conditions;
mod function;
mod generate;

pub use conditions::{interval_union_measure, v_alpha_check, van_zwet_check, VanZwetReport};
pub use function::ScoreFunction;
pub use generate::{approx_scores, exact_scores, median_scores};

use thiserror::Error;

/// Errors produced by score generation and condition checking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    /// Sequence length below the operation's minimum.
    #[error("sample size {n} is below the minimum {min}")]
    TooFewPoints { n: usize, min: usize },
    /// The score function produced a non-finite value at a grid node.
    #[error("score function {name:?} is not finite at t = {t}")]
    NonFiniteValue { name: String, t: f64 },
    /// Doubling the quadrature nodes moved a score by more than 1e-9.
    #[error("order-statistic integral for score {j} moved by {change:e} under node doubling; the score function may not be integrable")]
    QuadratureDivergence { j: usize, change: f64 },
    /// Growth exponent outside the open unit interval.
    #[error("alpha must lie strictly between 0 and 1, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    /// Refinement grid too coarse to be meaningful.
    #[error("refinement grid needs at least {min} points per side, got {size}")]
    GridTooSmall { size: usize, min: usize },
    /// Numerical differentiation of the score function failed.
    #[error("derivative of {name:?} is not finite at t = {t}")]
    DerivativeFailed { name: String, t: f64 },
    /// Regression constants and scores must pair up.
    #[error("regression and score sequences differ in length: {regression} vs {scores}")]
    LengthMismatch { regression: usize, scores: usize },
    /// Moment exponents outside their admissible region.
    #[error("need k > 2, 0 < r < k, s > 2, 0 < m < s; got r = {r}, k = {k}, m = {m}, s = {s}")]
    InvalidExponents { r: f64, k: f64, m: f64, s: f64 },
    /// Separation fraction must be a positive finite number.
    #[error("delta must be positive and finite, got {delta}")]
    InvalidDelta { delta: f64 },
    /// Separation radius below its sample-size floor.
    #[error("zeta = {zeta} is below the floor n^(-3/2) ln n = {min}")]
    ZetaTooSmall { zeta: f64, min: f64 },
    /// Input sequence contains NaN or an infinity.
    #[error("input contains a non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },
}
