//! Edgeworth-type corrections to the normal approximation, and the
//! distance diagnostics that measure how well they fit a discrete law.
//!
//! The crate offers four routes to a corrected distribution function
//! `Phi(x) - psi(x) * (Hermite polynomial in x)`:
//!
//! * [`expansion_matrix`]: coefficients read off a standardized score
//!   matrix via its cumulant summaries ([`linrank_matrix::moments`]);
//! * [`expansion_integral`]: coefficients from a regression vector and a
//!   score function on `(0, 1)`, with the score moments obtained by
//!   adaptive quadrature graded toward the endpoints;
//! * [`expansion_iid`]: the classical one-term correction for a sum of
//!   iid summands described by an [`IidSpec`];
//! * [`expansion_first_moment`]: the density-level correction used when
//!   comparing expectations instead of probabilities.
//!
//! [`iid_convolution`] produces the exact law of a standardized iid sum
//! for benchmarking, and [`sup_distance`] / [`delta2_condition`] measure
//! the sup-norm gap to a smooth comparand and the second-difference
//! smoothness constant of a discrete law.

mod distance;
mod expansion;
mod iid;
mod integral;

pub use distance::{delta2_condition, sup_distance};
pub use expansion::{
    expansion_first_moment, expansion_iid, expansion_matrix, EdgeworthExpansion,
};
pub use iid::{
    iid_convolution, iid_convolution_with_cap, iid_error_constant, IidSpec, DEFAULT_ATOM_CAP,
    MAX_SUMMANDS,
};
pub use integral::{expansion_integral, standardized_score_moments};

use thiserror::Error;

/// Errors from expansion construction and the distance diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EdgeworthError {
    /// Expansion order other than 1 or 2.
    #[error("expansion order {order} is not supported (1 or 2)")]
    BadOrder { order: u8 },
    /// Derivative order outside `1..=3`.
    #[error("derivative order {m} is outside the supported range 1..=3")]
    BadDerivative { m: usize },
    /// Regression constants must sum to 0 with unit sum of squares.
    #[error("regression constants are not standardized: sum {sum:.3e}, sum of squares {sum_sq}")]
    NotStandardized { sum: f64, sum_sq: f64 },
    /// The score function is constant on `(0, 1)`.
    #[error("score function is flat: the standardized score has zero variance")]
    DegenerateScore,
    /// A score moment integral kept growing under refinement.
    #[error("score moment integral of power {power} did not settle: refinement changed it by {change:.3e}")]
    Divergent { power: u32, change: f64 },
    /// The score function returned NaN or infinity inside `(0, 1)`.
    #[error("score function returned a non-finite value at t = {t}")]
    NonFiniteScore { t: f64 },
    /// Summand support must be nonempty, finite, with positive total mass.
    #[error("support must be a nonempty list of finite values with nonnegative weights of positive total")]
    BadSupport,
    /// Summand law must have mean 0 and second moment 1.
    #[error("support is not standardized: mean {mean:.3e}, second moment {second_moment}")]
    NotCentered { mean: f64, second_moment: f64 },
    /// Convolutions need at least one summand.
    #[error("need at least one summand")]
    EmptySample,
    /// Convolution size beyond the supported maximum.
    #[error("convolution size {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },
    /// The convolved support outgrew the atom cap.
    #[error("convolution support exceeded the cap of {cap} atoms (reached {atoms})")]
    TooManyAtoms { atoms: usize, cap: usize },
    /// Scale parameters must be positive and finite.
    #[error("scale must be positive and finite, got {scale}")]
    BadScale { scale: f64 },
    /// Inputs to the error-bound constant are out of range.
    #[error("error-constant inputs out of range: need c > 0, beta3 >= 1, beta4 >= 1")]
    BadConstant,
}
