use core::cell::Cell;

use linrank_kernels::integrate;
use linrank_scores::ScoreFunction;

use crate::{EdgeworthError, EdgeworthExpansion};

/// Absolute tolerance per quadrature panel; with ~100 panels the
/// accumulated error stays around 1e-11.
const PANEL_TOL: f64 = 1e-13;

/// Deepest grading level: `1 - 2^{-(GRADED_FINE+1)}` must stay strictly
/// below 1 in f64, so panels cannot collapse onto the endpoints where the
/// score function is never evaluated.
const GRADED_FINE: i32 = 50;

/// Shallow pass of the grading. Deep enough that an integrable
/// logarithmic-type endpoint singularity leaves less than the reporting
/// tolerance beyond it, while a non-integrable one keeps adding whole
/// panels between here and `GRADED_FINE`.
const GRADED_COARSE: i32 = 44;

/// The two passes must agree to this (relative to the integral size).
const REFINEMENT_TOL: f64 = 1e-9;

/// Expansion with coefficients from a regression vector and a score
/// function.
///
/// With `J` standardized to `J_hat = (J - int J) / sd(J)` on `(0, 1)` and
/// `e_hat` the regression constants (required to sum to 0 with unit sum
/// of squares), the coefficients are
///
/// ```text
/// skew   = (sum e_hat^3) int J_hat^3
/// excess = (sum e_hat^4) (int J_hat^4 - 3) - (3/n) (int J_hat^4 - 1)
/// ```
///
/// The score moments come from adaptive quadrature on dyadic panels
/// graded toward both endpoints, so integrable endpoint singularities
/// (the normal quantile, say) converge; a fourth power that keeps growing
/// under refinement is reported as divergent.
pub fn expansion_integral(
    e_hat: &[f64],
    score: &ScoreFunction,
    order: u8,
) -> Result<EdgeworthExpansion, EdgeworthError> {
    if !(1..=2).contains(&order) {
        return Err(EdgeworthError::BadOrder { order });
    }
    let sum: f64 = e_hat.iter().sum();
    let sum_sq: f64 = e_hat.iter().map(|e| e * e).sum();
    if sum.abs() > 1e-10 || (sum_sq - 1.0).abs() > 1e-10 {
        return Err(EdgeworthError::NotStandardized { sum, sum_sq });
    }

    let (third, fourth) = standardized_score_moments(score)?;
    let skew: f64 = e_hat.iter().map(|e| e.powi(3)).sum::<f64>() * third;
    if order == 1 {
        return Ok(EdgeworthExpansion::first_order(skew));
    }
    let n = e_hat.len() as f64;
    let excess = e_hat.iter().map(|e| e.powi(4)).sum::<f64>() * (fourth - 3.0)
        - (3.0 / n) * (fourth - 1.0);
    Ok(EdgeworthExpansion::second_order(skew, excess))
}

/// Third and fourth moments of the standardized score
/// `(J - int J) / sd(J)` over `(0, 1)`.
pub fn standardized_score_moments(score: &ScoreFunction) -> Result<(f64, f64), EdgeworthError> {
    let mut raw = [0.0; 4];
    for (k, slot) in raw.iter_mut().enumerate() {
        *slot = score_moment(score, k as u32 + 1)?;
    }
    let [m1, m2, m3, m4] = raw;

    let variance = m2 - m1 * m1;
    // A NaN variance must land on the error path too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(variance > 1e-12 * m2.abs().max(1.0)) {
        return Err(EdgeworthError::DegenerateScore);
    }
    let central3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
    let central4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
    Ok((
        central3 / variance.powf(1.5),
        central4 / (variance * variance),
    ))
}

/// `int_0^1 J(t)^power dt` on graded dyadic panels, two passes deep.
fn score_moment(score: &ScoreFunction, power: u32) -> Result<f64, EdgeworthError> {
    let coarse = graded_pass(score, power, GRADED_COARSE)?;
    let fine = graded_pass(score, power, GRADED_FINE)?;
    let change = (fine - coarse).abs();
    // A NaN change must land on the error path too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(change <= REFINEMENT_TOL * (1.0 + fine.abs())) {
        return Err(EdgeworthError::Divergent { power, change });
    }
    Ok(fine)
}

fn graded_pass(score: &ScoreFunction, power: u32, levels: i32) -> Result<f64, EdgeworthError> {
    let bad_point: Cell<Option<f64>> = Cell::new(None);
    let integrand = |t: f64| {
        let v = score.eval(t);
        if v.is_finite() {
            v.powi(power as i32)
        } else {
            if bad_point.get().is_none() {
                bad_point.set(Some(t));
            }
            0.0
        }
    };
    let mut total = 0.0;
    for l in 1..=levels {
        let lo = 0.5f64.powi(l + 1);
        let hi = 0.5f64.powi(l);
        total += integrate(integrand, lo, hi, PANEL_TOL);
        total += integrate(integrand, 1.0 - hi, 1.0 - lo, PANEL_TOL);
    }
    if let Some(t) = bad_point.get() {
        return Err(EdgeworthError::NonFiniteScore { t });
    }
    Ok(total)
}
