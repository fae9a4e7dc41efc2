//! Distributions of the linear statistic `T = sum_i a_{i pi(i)}` under a
//! uniformly random permutation `pi`.
//!
//! The crate provides exact enumeration (with deterministic work
//! partitioning), Monte Carlo sampling whose output is invariant to the
//! number of worker threads, closed-form third and fourth moments of the
//! standardized statistic, and a five-permutation coupling sampler: a chain
//! `pi_1, ..., pi_5` of uniform permutations, each a bounded perturbation
//! of the next, whose increments reproduce the statistic's moments through
//! small exchange terms.
//!
//! With the default `parallel` feature the enumeration, sampling and batch
//! routines fan out over rayon; `*_seq` variants always run on the calling
//! thread and produce bit-identical results.

mod cdf;
mod coupling;
mod enumerate;
mod mc;
mod moments;

pub use cdf::StepCdf;
pub use coupling::{
    coupling_exact_law, coupling_mc_batch, coupling_mc_batch_seq, for_each_coupling_state,
    pattern_is_valid, sample_coupling, CouplingBatch, CouplingDraw, CouplingLaw, CouplingSampler,
};
pub use enumerate::{
    exact_distribution, exact_distribution_seq, exact_distribution_with_cutoff,
    two_sample_distribution, DEFAULT_CUTOFF, MAX_CUTOFF,
};
pub use mc::{
    mc_distribution, mc_distribution_seq, mc_distribution_standardized,
    mc_distribution_standardized_seq,
};
pub use moments::{moments_exact, moments_simplified, third_moment_exact, MomentsSimplified};

use linrank_matrix::MatrixError;

/// Errors from enumeration, sampling, and moment computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PermError {
    /// Enumeration would need more than `cutoff!` permutations.
    #[error("n = {n} exceeds the enumeration cutoff {cutoff}; use Monte Carlo sampling instead")]
    AboveCutoff { n: usize, cutoff: usize },
    /// A requested cutoff is beyond what enumeration supports.
    #[error("cutoff {cutoff} exceeds the supported maximum {max}")]
    CutoffTooLarge { cutoff: usize, max: usize },
    /// Standardized output requested for a constant statistic.
    #[error("degenerate matrix: sigma^2 = 0, standardized values are undefined")]
    Degenerate,
    /// The operation needs a larger matrix.
    #[error("n = {n} is too small: need at least {min}")]
    TooSmall { n: usize, min: usize },
    /// Monte Carlo with zero draws.
    #[error("draws must be at least 1")]
    NoDraws,
    /// A two-sample group size outside `1..n`.
    #[error("group size {group} must satisfy 1 <= group < n = {n}")]
    BadGroup { group: usize, n: usize },
    /// The exact coupling law is only enumerable for tiny matrices.
    #[error("n = {n} exceeds the exact coupling-law maximum {max}")]
    LawTooLarge { n: usize, max: usize },
    /// Two-sample enumeration would visit too many subsets.
    #[error("{combinations} subsets exceed the enumeration budget {max}")]
    TooManySubsets { combinations: u128, max: u128 },
    /// Invalid input matrix or score vector.
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `k!` for the small factorials used by rank arithmetic; `k <= 20`.
pub(crate) fn factorial(k: usize) -> u64 {
    (2..=k as u64).product()
}
