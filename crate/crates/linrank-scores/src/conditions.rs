use crate::{ScoreError, ScoreFunction};

/// Outcome of checking the spread and separation conditions on a pair of
/// regression constants `e` and scores `d`.
///
/// The reported constants are the tightest ones satisfying the moment
/// inequalities: `e = (1/n) sum |e_i - mean|^r`, `e_cap` the same with
/// exponent `k`, and `d`/`d_cap` the score-side analogues with exponents
/// `m` and `s`. A condition is satisfied when a positive finite constant of
/// the required kind exists; separation additionally compares the measure
/// of the union of `(d_j - zeta, d_j + zeta)` against `delta * n * zeta`.
/// The rate exponents translate the chosen `k` and `s` into the decay of
/// the squared fourth-moment and cubed fifth-moment matrix functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanZwetReport {
    pub r: f64,
    pub k: f64,
    pub m: f64,
    pub s: f64,
    pub e: f64,
    pub e_cap: f64,
    pub d: f64,
    pub d_cap: f64,
    pub delta: f64,
    pub zeta: f64,
    pub union_measure: f64,
    pub regression_spread_ok: bool,
    pub score_spread_ok: bool,
    pub score_separation_ok: bool,
    pub rate_exponent_first: f64,
    pub rate_exponent_second: f64,
}

impl VanZwetReport {
    pub fn all_satisfied(&self) -> bool {
        self.regression_spread_ok && self.score_spread_ok && self.score_separation_ok
    }
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

fn centered_power_mean(values: &[f64], mean: f64, p: f64) -> f64 {
    values.iter().map(|v| (v - mean).abs().powf(p)).sum::<f64>() / values.len() as f64
}

/// Lebesgue measure of the union of open intervals `(d_j - zeta, d_j + zeta)`.
pub fn interval_union_measure(d: &[f64], zeta: f64) -> f64 {
    if d.is_empty() || zeta <= 0.0 {
        return 0.0;
    }
    let mut centers = d.to_vec();
    centers.sort_by(|a, b| a.total_cmp(b));
    let mut total = 0.0;
    let mut lo = centers[0] - zeta;
    let mut hi = centers[0] + zeta;
    for &c in &centers[1..] {
        if c - zeta <= hi {
            hi = c + zeta;
        } else {
            total += hi - lo;
            lo = c - zeta;
            hi = c + zeta;
        }
    }
    total + (hi - lo)
}

/// Checks the spread conditions on regression constants and scores and the
/// score separation condition, and reports the implied constants together
/// with the Edgeworth error-rate exponents for the chosen moments.
///
/// `zeta` defaults to its floor `n^{-3/2} ln n`; a supplied value below the
/// floor is rejected.
#[allow(clippy::too_many_arguments)]
pub fn van_zwet_check(
    e: &[f64],
    d: &[f64],
    r: f64,
    k: f64,
    m: f64,
    s: f64,
    delta: f64,
    zeta: Option<f64>,
) -> Result<VanZwetReport, ScoreError> {
    if e.len() != d.len() {
        return Err(ScoreError::LengthMismatch {
            regression: e.len(),
            scores: d.len(),
        });
    }
    let n = e.len();
    if n < 2 {
        return Err(ScoreError::TooFewPoints { n, min: 2 });
    }
    if !(k > 2.0 && r > 0.0 && r < k && s > 2.0 && m > 0.0 && m < s) {
        return Err(ScoreError::InvalidExponents { r, k, m, s });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ScoreError::InvalidDelta { delta });
    }
    for (index, v) in e.iter().chain(d.iter()).enumerate() {
        if !v.is_finite() {
            return Err(ScoreError::NonFiniteEntry { index: index % n });
        }
    }
    let zeta_floor = (n as f64).powf(-1.5) * (n as f64).ln();
    let zeta = match zeta {
        Some(z) if z < zeta_floor => {
            return Err(ScoreError::ZetaTooSmall {
                zeta: z,
                min: zeta_floor,
            })
        }
        Some(z) => z,
        None => zeta_floor,
    };

    let e_mean = e.iter().sum::<f64>() / n as f64;
    let d_mean = d.iter().sum::<f64>() / n as f64;
    let e_low = centered_power_mean(e, e_mean, r);
    let e_high = centered_power_mean(e, e_mean, k);
    let d_low = centered_power_mean(d, d_mean, m);
    let d_high = centered_power_mean(d, d_mean, s);
    let union_measure = interval_union_measure(d, zeta);

    Ok(VanZwetReport {
        r,
        k,
        m,
        s,
        e: e_low,
        e_cap: e_high,
        d: d_low,
        d_cap: d_high,
        delta,
        zeta,
        union_measure,
        regression_spread_ok: e_low > 0.0 && e_high.is_finite(),
        score_spread_ok: d_low > 0.0 && d_high.is_finite(),
        score_separation_ok: union_measure >= delta * n as f64 * zeta,
        rate_exponent_first: -1.0
            + positive_part(4.0 / k - 1.0)
            + positive_part(4.0 / s - 1.0),
        rate_exponent_second: -1.5
            + positive_part(5.0 / k - 1.0)
            + positive_part(5.0 / s - 1.0),
    })
}

/// Largest observed value of `|J'(t)| (t (1 - t))^{1 + alpha}` over a grid
/// that thickens geometrically toward the endpoints, paired with a
/// stability verdict: the estimate must stay within 5% when the grid is
/// doubled and pushed four decades closer to the endpoints.
///
/// This is necessarily a bounded surrogate for a supremum over `(0, 1)`;
/// score functions whose derivative grows faster than the weight decays
/// show up through a diverging refinement rather than an overflow.
pub fn v_alpha_check(
    score: &ScoreFunction,
    alpha: f64,
    grid_size: usize,
) -> Result<(f64, bool), ScoreError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ScoreError::InvalidAlpha { alpha });
    }
    if grid_size < 8 {
        return Err(ScoreError::GridTooSmall {
            size: grid_size,
            min: 8,
        });
    }
    let first = weighted_slope_sup(score, alpha, grid_size, 1e-8)?;
    let refined = weighted_slope_sup(score, alpha, grid_size * 2, 1e-12)?;
    let holds = first.is_finite()
        && refined.is_finite()
        && (refined - first).abs() <= 0.05 * first.abs().max(f64::MIN_POSITIVE);
    Ok((refined.max(first), holds))
}

fn weighted_slope_sup(
    score: &ScoreFunction,
    alpha: f64,
    points_per_side: usize,
    t_min: f64,
) -> Result<f64, ScoreError> {
    let ratio = (0.5 / t_min).ln();
    let mut sup = 0.0_f64;
    for i in 0..points_per_side {
        let u = i as f64 / (points_per_side - 1) as f64;
        let t = t_min * (ratio * u).exp();
        for probe in [t, 1.0 - t] {
            let slope = score.slope(probe);
            if slope.is_nan() {
                return Err(ScoreError::DerivativeFailed {
                    name: score.name().to_string(),
                    t: probe,
                });
            }
            let weighted = slope.abs() * (probe * (1.0 - probe)).powf(1.0 + alpha);
            sup = sup.max(weighted);
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{approx_scores, median_scores};
    use approx::assert_abs_diff_eq;

    #[test]
    fn overlapping_intervals_merge() {
        assert_abs_diff_eq!(
            interval_union_measure(&[0.10, 0.15], 0.05),
            0.15,
            epsilon = 1e-12
        );
        // disjoint intervals add up, duplicates collapse
        assert_abs_diff_eq!(
            interval_union_measure(&[0.0, 1.0, 1.0], 0.1),
            0.4,
            epsilon = 1e-12
        );
        assert_eq!(interval_union_measure(&[], 0.1), 0.0);
    }

    #[test]
    fn identity_growth_constant_is_attained_at_the_middle() {
        let (gamma, holds) =
            v_alpha_check(&ScoreFunction::wilcoxon(), 0.1, 64).unwrap();
        assert_abs_diff_eq!(gamma, 0.25_f64.powf(1.1), epsilon = 1e-12);
        assert!(holds);
    }

    #[test]
    fn quantile_scores_satisfy_the_growth_condition() {
        let (gamma, holds) =
            v_alpha_check(&ScoreFunction::van_der_waerden(), 0.05, 64).unwrap();
        assert!(holds, "gamma = {gamma}");
        assert!(gamma.is_finite() && gamma > 0.0);
    }

    #[test]
    fn inverse_square_root_diverges() {
        let f = ScoreFunction::new("invsqrt", |t| t.powf(-0.5));
        let (gamma, holds) = v_alpha_check(&f, 0.1, 64).unwrap();
        assert!(!holds, "gamma = {gamma}");
    }

    #[test]
    fn rejects_bad_alpha_and_grid() {
        let f = ScoreFunction::wilcoxon();
        assert_eq!(
            v_alpha_check(&f, 0.0, 64),
            Err(ScoreError::InvalidAlpha { alpha: 0.0 })
        );
        assert_eq!(
            v_alpha_check(&f, 1.0, 64),
            Err(ScoreError::InvalidAlpha { alpha: 1.0 })
        );
        assert_eq!(
            v_alpha_check(&f, 0.5, 4),
            Err(ScoreError::GridTooSmall { size: 4, min: 8 })
        );
    }

    #[test]
    fn rank_fraction_scores_constant() {
        let d = approx_scores(&ScoreFunction::wilcoxon(), 10).unwrap();
        let e: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let report = van_zwet_check(&e, &d, 2.0, 4.0, 2.0, 4.0, 0.5, None).unwrap();
        assert_abs_diff_eq!(report.d, 82.5 / 1210.0, epsilon = 1e-12);
        assert!(report.regression_spread_ok);
        assert!(report.score_spread_ok);
    }

    #[test]
    fn separation_fails_for_two_clusters_and_holds_for_spread_scores() {
        let n = 64;
        let e: Vec<f64> = (0..n).map(|i| i as f64).collect();

        let med = median_scores(n).unwrap();
        let two_clusters =
            van_zwet_check(&e, &med, 2.0, 4.0, 2.0, 4.0, 0.1, None).unwrap();
        assert!(!two_clusters.score_separation_ok);
        assert!(!two_clusters.all_satisfied());
        assert_abs_diff_eq!(
            two_clusters.union_measure,
            4.0 * two_clusters.zeta,
            epsilon = 1e-15
        );

        let wil = approx_scores(&ScoreFunction::wilcoxon(), n).unwrap();
        let spread = van_zwet_check(&e, &wil, 2.0, 4.0, 2.0, 4.0, 0.5, None).unwrap();
        assert!(spread.score_separation_ok);
        assert!(spread.all_satisfied());
    }

    #[test]
    fn rate_exponents_follow_the_chosen_moments() {
        let e = [0.0, 1.0, 2.0, 3.0];
        let d = [0.0, 0.25, 0.5, 0.75];
        let report = van_zwet_check(&e, &d, 2.0, 4.0, 2.0, 4.0, 0.1, None).unwrap();
        assert_eq!(report.rate_exponent_first, -1.0);
        assert_eq!(report.rate_exponent_second, -1.5 + 2.0 * 0.25);

        let heavier = van_zwet_check(&e, &d, 2.0, 3.0, 2.0, 6.0, 0.1, None).unwrap();
        assert_abs_diff_eq!(
            heavier.rate_exponent_first,
            -1.0 + (4.0 / 3.0 - 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            heavier.rate_exponent_second,
            -1.5 + (5.0 / 3.0 - 1.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn domain_guards() {
        let e = [0.0, 1.0, 2.0];
        let d = [0.0, 0.5, 1.0];
        assert!(matches!(
            van_zwet_check(&e, &d[..2], 2.0, 4.0, 2.0, 4.0, 0.1, None),
            Err(ScoreError::LengthMismatch { .. })
        ));
        assert!(matches!(
            van_zwet_check(&e, &d, 2.0, 2.0, 2.0, 4.0, 0.1, None),
            Err(ScoreError::InvalidExponents { .. })
        ));
        assert!(matches!(
            van_zwet_check(&e, &d, 2.0, 4.0, 2.0, 4.0, 0.0, None),
            Err(ScoreError::InvalidDelta { .. })
        ));
        assert!(matches!(
            van_zwet_check(&e, &d, 2.0, 4.0, 2.0, 4.0, 0.1, Some(1e-6)),
            Err(ScoreError::ZetaTooSmall { .. })
        ));
        assert!(matches!(
            van_zwet_check(&[0.0, f64::NAN, 1.0], &d, 2.0, 4.0, 2.0, 4.0, 0.1, None),
            Err(ScoreError::NonFiniteEntry { .. })
        ));
    }

    #[test]
    fn constant_sequences_fail_the_spread_conditions() {
        let e = [1.0; 6];
        let d = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let report = van_zwet_check(&e, &d, 2.0, 4.0, 2.0, 4.0, 0.1, None).unwrap();
        assert!(!report.regression_spread_ok);
        assert!(report.score_spread_ok);
        assert_eq!(report.e, 0.0);
    }
}
