//! Gaussian kernels and the analytic toolbox for normal approximation work.
//!
//! The crate collects small, pure numerical functions that the rest of the
//! workspace builds on:
//!
//! * [`psi`], [`phi`], [`mills`], [`normal_quantile`]: the standard normal
//!   density, distribution function, Mills ratio and quantile;
//! * [`integrate`] / [`integrate_gaussian`]: adaptive Gauss-Kronrod
//!   quadrature, with a convenience wrapper for density-weighted integrals;
//! * [`hermite`], [`hermite_psi`], [`hermite_weighted_norm`]: Hermite
//!   polynomials (probabilists' convention) and sup norms of their
//!   density-weighted versions;
//! * [`SteinSolution`], [`stein_f`], [`stein_f_prime`]: the bounded solution
//!   of Stein's equation for truncated absolute-moment targets
//!   `|x|^k 1(x <= z)`, plus the signed first-moment variant [`stein_f1`];
//! * [`SmoothKernel`], [`smooth_eval`], [`smooth_derivative`],
//!   [`r_moment_integrals`]: piecewise-polynomial indicator smoothings of
//!   linear, quadratic and cubic order;
//! * [`difference`], [`interp_poly`]: forward differences and Newton
//!   interpolation on equally spaced nodes.
//!
//! Everything is a pure function of its arguments and safe for unrestricted
//! concurrent use.

mod diffops;
mod hermite;
mod normal;
mod quad;
mod smooth;
mod stein;

pub use diffops::{difference, interp_poly};
pub use hermite::{hermite, hermite_psi, hermite_weighted_norm};
pub use normal::{mills, normal_quantile, phi, psi, upper_tail, INV_SQRT_2PI};
pub use quad::{integrate, integrate_gaussian, GAUSSIAN_SUPPORT};
pub use smooth::{r_moment_integrals, smooth_derivative, smooth_eval, KernelKind, PowerFactor, SmoothKernel};
pub use stein::{eta, stein_f, stein_f1, stein_f1_prime, stein_f_prime, truncated_abs_moment, SteinSolution};

use thiserror::Error;

/// Errors from kernel construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    /// Polynomial degree outside the supported range.
    #[error("polynomial degree {n} exceeds the supported maximum {max}")]
    DegreeTooLarge { n: usize, max: usize },
    /// Moment order outside the supported range.
    #[error("moment order {k} is outside the supported range 0..={max}")]
    MomentOrderOutOfRange { k: usize, max: usize },
    /// Smoothing width must be positive and finite.
    #[error("kernel width must be positive and finite, got {lambda}")]
    InvalidWidth { lambda: f64 },
    /// Derivative order beyond what any kernel supports.
    #[error("derivative order {order} exceeds the supported maximum 3")]
    UnsupportedDerivative { order: u32 },
    /// The requested derivative does not exist at a kink of the kernel.
    #[error("derivative of order {order} does not exist at the knot x = {x}")]
    DerivativeAtKnot { x: f64, order: u32 },
    /// Difference order outside `1..=8`.
    #[error("difference order {k} is outside the supported range 1..=8")]
    DifferenceOrderOutOfRange { k: usize },
    /// Interpolation degree outside `0..=8`.
    #[error("interpolation degree {k} exceeds the supported maximum 8")]
    InterpDegreeTooLarge { k: usize },
    /// Zero node spacing makes the interpolation nodes coincide.
    #[error("interpolation step must be nonzero for degree {k} >= 1")]
    DegenerateStep { k: usize },
    /// Quantile argument outside the open unit interval.
    #[error("probability must lie strictly between 0 and 1, got {p}")]
    InvalidProbability { p: f64 },
}
