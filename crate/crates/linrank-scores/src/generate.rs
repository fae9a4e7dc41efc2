use crate::function::ClosedForm;
use crate::{ScoreError, ScoreFunction};
use core::cell::Cell;
use linrank_kernels::integrate;
use nalgebra::{DMatrix, SymmetricEigen};
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// Successive refinement must move no score by more than this.
const REFINEMENT_TOL: f64 = 1e-9;

/// Absolute tolerance per panel in the graded scheme; with ~2^7 panels the
/// accumulated error stays well below `REFINEMENT_TOL`.
const PANEL_TOL: f64 = 1e-13;

/// Deepest grading level: `1 - 2^{-(GRADED_FINE+1)}` must stay strictly
/// below 1 in f64, so panels cannot collapse onto the endpoint, where the
/// score function is never evaluated.
const GRADED_FINE: i32 = 50;

/// Shallow pass of the grading. Deep enough that any integrable
/// logarithmic-type endpoint singularity leaves less than `REFINEMENT_TOL`
/// of mass beyond it, while a non-integrable one keeps adding whole panels
/// between here and `GRADED_FINE`.
const GRADED_COARSE: i32 = 44;

/// Approximating scores `d_j = J(j / (n + 1))`.
pub fn approx_scores(score: &ScoreFunction, n: usize) -> Result<Vec<f64>, ScoreError> {
    if n < 1 {
        return Err(ScoreError::TooFewPoints { n, min: 1 });
    }
    let denom = (n + 1) as f64;
    (1..=n)
        .map(|j| {
            let t = j as f64 / denom;
            let v = score.eval(t);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ScoreError::NonFiniteValue {
                    name: score.name().to_string(),
                    t,
                })
            }
        })
        .collect()
}

/// Exact scores `d_j = E J(U_{j:n})`, the expectations of the score
/// function under the uniform order statistics.
///
/// The integral against the order-statistic density is first evaluated
/// with a quadrature rule built for the weight `t^{j-1} (1 - t)^{n-j}`
/// itself; node doubling that moves any score by more than 1e-9 demotes
/// the result. Scores that fail the doubling test (endpoint singularities
/// of `J`, like the normal quantile, slow the rule to algebraic
/// convergence) are recomputed on dyadic panels graded toward the
/// endpoints; only when deepening the grading still moves a score is
/// non-convergence reported, which singles out non-integrable `J`. Two
/// built-ins short-circuit to closed forms: the Wilcoxon family
/// (`j / (n + 1)`) and the median family (a binomial tail, where
/// quadrature of the jump would not stabilize).
pub fn exact_scores(score: &ScoreFunction, n: usize) -> Result<Vec<f64>, ScoreError> {
    if n < 1 {
        return Err(ScoreError::TooFewPoints { n, min: 1 });
    }
    match score.closed_form() {
        Some(ClosedForm::Identity) => {
            let denom = (n + 1) as f64;
            Ok((1..=n).map(|j| j as f64 / denom).collect())
        }
        Some(ClosedForm::StepAtHalf) => Ok(median_exact(n)),
        None => exact_scores_quadrature(score, n),
    }
}

/// `E J(U_{j:n})` for the centred step: `1 - 2 P(U_{j:n} <= 1/2)`, through
/// the regularized incomplete beta function.
fn median_exact(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let order_stat = Beta::new(j as f64, (n - j + 1) as f64)
                .expect("positive shape parameters");
            1.0 - 2.0 * order_stat.cdf(0.5)
        })
        .collect()
}

/// Quadrature path of [`exact_scores`], kept separate so tests can drive
/// arbitrary score functions through it.
pub(crate) fn exact_scores_quadrature(
    score: &ScoreFunction,
    n: usize,
) -> Result<Vec<f64>, ScoreError> {
    let base = (n + 64).div_ceil(2);
    let coarse = quadrature_pass(score, n, base)?;
    let fine = quadrature_pass(score, n, 2 * base)?;
    if scores_agree(&coarse, &fine).is_ok() {
        return Ok(fine);
    }
    let coarse = graded_pass(score, n, GRADED_COARSE)?;
    let fine = graded_pass(score, n, GRADED_FINE)?;
    scores_agree(&coarse, &fine)?;
    Ok(fine)
}

fn scores_agree(coarse: &[f64], fine: &[f64]) -> Result<(), ScoreError> {
    for (j, (a, b)) in coarse.iter().zip(fine.iter()).enumerate() {
        let change = (a - b).abs();
        // NaN counts as disagreement
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(change <= REFINEMENT_TOL) {
            return Err(ScoreError::QuadratureDivergence { j: j + 1, change });
        }
    }
    Ok(())
}

/// Integrates `J` against each order-statistic density over dyadic panels
/// `[2^{-l-1}, 2^{-l}]` (and their mirror images) down to the given depth.
/// Integrable endpoint singularities of `J` contribute geometrically
/// decaying panel masses, so the panel sum stabilizes as `levels` grows.
fn graded_pass(
    score: &ScoreFunction,
    n: usize,
    levels: i32,
) -> Result<Vec<f64>, ScoreError> {
    let bad_point: Cell<Option<f64>> = Cell::new(None);
    let nf = n as f64;
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let jf = j as f64;
        let ln_prefactor = nf.ln() + ln_gamma(nf) - ln_gamma(jf) - ln_gamma(nf - jf + 1.0);
        let integrand = |t: f64| {
            let v = score.eval(t);
            if !v.is_finite() {
                if bad_point.get().is_none() {
                    bad_point.set(Some(t));
                }
                return 0.0;
            }
            let mut ln_density = ln_prefactor;
            if j > 1 {
                ln_density += (jf - 1.0) * t.ln();
            }
            if j < n {
                ln_density += (nf - jf) * (1.0 - t).ln();
            }
            v * ln_density.exp()
        };
        let mut total = 0.0;
        for l in 1..=levels {
            let lo = 0.5f64.powi(l + 1);
            let hi = 0.5f64.powi(l);
            total += integrate(integrand, lo, hi, PANEL_TOL);
            total += integrate(integrand, 1.0 - hi, 1.0 - lo, PANEL_TOL);
        }
        if let Some(t) = bad_point.get() {
            return Err(ScoreError::NonFiniteValue {
                name: score.name().to_string(),
                t,
            });
        }
        out.push(total);
    }
    Ok(out)
}

fn quadrature_pass(
    score: &ScoreFunction,
    n: usize,
    nodes: usize,
) -> Result<Vec<f64>, ScoreError> {
    (1..=n)
        .map(|j| {
            let (points, weights) = gauss_jacobi(nodes, (n - j) as f64, (j - 1) as f64);
            let mut total = 0.0;
            for (x, w) in points.iter().zip(weights.iter()) {
                let t = 0.5 * (1.0 + x);
                let v = score.eval(t);
                if !v.is_finite() {
                    return Err(ScoreError::NonFiniteValue {
                        name: score.name().to_string(),
                        t,
                    });
                }
                total += w * v;
            }
            Ok(total)
        })
        .collect()
}

/// Nodes and weights for the weight `(1 - x)^alpha (1 + x)^beta` on
/// `[-1, 1]`, with the weights normalized to total mass 1.
///
/// The prefactor of the order-statistic density cancels exactly against
/// the weight's total mass, so the normalized rule integrates `J` against
/// the density of `U_{j:n}` directly.
fn gauss_jacobi(nodes: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let apb = alpha + beta;
    let mut m = DMatrix::<f64>::zeros(nodes, nodes);
    for i in 0..nodes {
        let k = i as f64;
        m[(i, i)] = if i == 0 {
            (beta - alpha) / (apb + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * k + apb) * (2.0 * k + apb + 2.0))
        };
        if i >= 1 {
            let num = 4.0 * k * (k + alpha) * (k + beta) * (k + apb);
            let den = (2.0 * k + apb).powi(2) * (2.0 * k + apb + 1.0) * (2.0 * k + apb - 1.0);
            let off = (num / den).sqrt();
            m[(i, i - 1)] = off;
            m[(i - 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut rule: Vec<(f64, f64)> = (0..nodes)
        .map(|i| {
            let first = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], first * first)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule.into_iter().unzip()
}

/// Median scores: `-1` on the lower half of the ranks, `+1` on the upper.
pub fn median_scores(n: usize) -> Result<Vec<f64>, ScoreError> {
    if n < 2 {
        return Err(ScoreError::TooFewPoints { n, min: 2 });
    }
    let half = n / 2;
    Ok((1..=n).map(|j| if j <= half { -1.0 } else { 1.0 }).collect())
}
