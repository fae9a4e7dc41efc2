use linrank_kernels::{hermite_psi, phi, psi};
use linrank_matrix::MatrixMoments;

use crate::{EdgeworthError, IidSpec};

/// A corrected normal distribution function
///
/// ```text
/// e(x) = Phi(x) - psi(x) * [ (skew/6) H_2(x)
///                          + (excess/24) H_3(x) + (skew^2/72) H_5(x) ]
/// ```
///
/// where `H_k` are the probabilists' Hermite polynomials. The first-order
/// form keeps only the `H_2` term; the second order adds the other two.
/// With all coefficients zero the function is exactly `Phi`, and any
/// coefficient choice leaves the tail limits at 0 and 1.
///
/// Derivatives are evaluated in closed form through the recursion
/// `(H_k psi)' = -H_{k+1} psi`, so no numeric differentiation is involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeworthExpansion {
    order: u8,
    skew: f64,
    excess: f64,
}

impl EdgeworthExpansion {
    /// One-term correction driven by the skewness coefficient alone.
    pub fn first_order(skew: f64) -> EdgeworthExpansion {
        assert!(skew.is_finite());
        EdgeworthExpansion {
            order: 1,
            skew,
            excess: 0.0,
        }
    }

    /// Two-term correction with skewness and excess-kurtosis coefficients.
    pub fn second_order(skew: f64, excess: f64) -> EdgeworthExpansion {
        assert!(skew.is_finite() && excess.is_finite());
        EdgeworthExpansion {
            order: 2,
            skew,
            excess,
        }
    }

    /// Expansion order, 1 or 2.
    pub fn order(&self) -> u8 {
        self.order
    }

    /// Coefficient of the `H_2` term times 6.
    pub fn skew(&self) -> f64 {
        self.skew
    }

    /// Coefficient of the `H_3` term times 24 (0 for first order).
    pub fn excess(&self) -> f64 {
        self.excess
    }

    /// Hermite degrees and weights of the correction polynomial.
    fn terms(&self) -> ([(usize, f64); 3], usize) {
        let mut terms = [(2usize, self.skew / 6.0), (0, 0.0), (0, 0.0)];
        let mut len = 1;
        if self.order == 2 {
            terms[1] = (3, self.excess / 24.0);
            terms[2] = (5, self.skew * self.skew / 72.0);
            len = 3;
        }
        (terms, len)
    }

    /// The corrected distribution function at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let (terms, len) = self.terms();
        let mut correction = 0.0;
        for &(degree, weight) in &terms[..len] {
            correction += weight * weighted_hermite(degree, x);
        }
        phi(x) - correction
    }

    /// The `m`-th derivative of [`eval`](Self::eval) at `x`, `m` in `1..=3`.
    ///
    /// Since `(H_k psi)' = -H_{k+1} psi`, each derivative shifts every
    /// Hermite degree up by one and alternates the overall sign:
    ///
    /// ```text
    /// e^(m)(x) = (-1)^(m-1) psi(x) * [ H_{m-1}(x) + sum_k w_k H_{k+m}(x) ]
    /// ```
    pub fn derivative(&self, m: usize, x: f64) -> Result<f64, EdgeworthError> {
        if !(1..=3).contains(&m) {
            return Err(EdgeworthError::BadDerivative { m });
        }
        let (terms, len) = self.terms();
        let mut value = weighted_hermite(m - 1, x);
        for &(degree, weight) in &terms[..len] {
            value += weight * weighted_hermite(degree + m, x);
        }
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        Ok(sign * value)
    }
}

/// `H_n(x) psi(x)` for the small fixed degrees used here.
fn weighted_hermite(n: usize, x: f64) -> f64 {
    hermite_psi(n, x).expect("degree stays far below the supported maximum")
}

/// Expansion with coefficients read off a score matrix.
///
/// The first order uses the matrix skewness coefficient `lambda1`; the
/// second order adds the fourth-order coefficient `lambda2`.
pub fn expansion_matrix(
    moms: &MatrixMoments,
    order: u8,
) -> Result<EdgeworthExpansion, EdgeworthError> {
    match order {
        1 => Ok(EdgeworthExpansion::first_order(moms.lambda1)),
        2 => Ok(EdgeworthExpansion::second_order(moms.lambda1, moms.lambda2)),
        _ => Err(EdgeworthError::BadOrder { order }),
    }
}

/// One-term correction for a standardized sum of `n` iid summands:
/// `e(x) = Phi(x) - (mu3 / (6 sqrt n)) (x^2 - 1) psi(x)`.
pub fn expansion_iid(spec: &IidSpec, n: usize) -> Result<EdgeworthExpansion, EdgeworthError> {
    if n == 0 {
        return Err(EdgeworthError::EmptySample);
    }
    Ok(EdgeworthExpansion::first_order(
        spec.mu3() / (n as f64).sqrt(),
    ))
}

/// Density-level correction for first-moment comparisons:
/// `z -> -psi(z) - z^3 psi(z) * lambda1 / 6`.
///
/// This is the derivative-scale analogue of the distribution-function
/// correction; it integrates to 0 over the real line when `lambda1 = 0`
/// would make the law symmetric.
pub fn expansion_first_moment(moms: &MatrixMoments) -> impl Fn(f64) -> f64 {
    let skew = moms.lambda1;
    move |z: f64| -psi(z) - z.powi(3) * psi(z) * (skew / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use linrank_matrix::{build_matrix, moments};

    fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        let mut x = lo;
        while x <= hi + 1e-12 {
            xs.push(x);
            x += step;
        }
        xs
    }

    #[test]
    fn zero_coefficients_reproduce_the_normal_cdf() {
        let e1 = EdgeworthExpansion::first_order(0.0);
        let e2 = EdgeworthExpansion::second_order(0.0, 0.0);
        for x in grid(-8.0, 8.0, 0.25) {
            assert_eq!(e1.eval(x), phi(x));
            assert_eq!(e2.eval(x), phi(x));
        }
    }

    #[test]
    fn correction_vanishes_at_hermite_roots() {
        let e1 = EdgeworthExpansion::first_order(1.7);
        assert_eq!(e1.eval(1.0), phi(1.0));
        assert_eq!(e1.eval(-1.0), phi(-1.0));

        let e2 = EdgeworthExpansion::second_order(0.0, 2.3);
        let root = 3f64.sqrt();
        assert_abs_diff_eq!(e2.eval(root), phi(root), epsilon = 1e-15);
    }

    #[test]
    fn tails_settle_at_zero_and_one() {
        for e in [
            EdgeworthExpansion::first_order(2.0),
            EdgeworthExpansion::second_order(1.5, 5.0),
            EdgeworthExpansion::second_order(-3.0, -2.0),
        ] {
            assert!(e.eval(-12.0).abs() < 1e-8);
            assert!((e.eval(12.0) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn eval_matches_the_written_out_polynomials() {
        let skew = 0.82;
        let excess = -1.4;
        let e2 = EdgeworthExpansion::second_order(skew, excess);
        for x in grid(-4.0, 4.0, 0.37) {
            let by_hand = phi(x)
                - psi(x)
                    * (skew / 6.0 * (x * x - 1.0)
                        + excess / 24.0 * (x.powi(3) - 3.0 * x)
                        + skew * skew / 72.0 * (x.powi(5) - 10.0 * x.powi(3) + 15.0 * x));
            assert_abs_diff_eq!(e2.eval(x), by_hand, epsilon = 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let e = EdgeworthExpansion::second_order(0.9, 1.8);
        for x in grid(-3.0, 3.0, 0.61) {
            let h = 1e-5;
            let d1 = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(e.derivative(1, x).unwrap(), d1, epsilon = 1e-8);

            let h = 1e-4;
            let d2 = (e.eval(x + h) - 2.0 * e.eval(x) + e.eval(x - h)) / (h * h);
            assert_abs_diff_eq!(e.derivative(2, x).unwrap(), d2, epsilon = 1e-6);

            let h = 1e-3;
            let d3 = (e.eval(x + 2.0 * h) - 2.0 * e.eval(x + h) + 2.0 * e.eval(x - h)
                - e.eval(x - 2.0 * h))
                / (2.0 * h * h * h);
            assert_abs_diff_eq!(e.derivative(3, x).unwrap(), d3, epsilon = 1e-4);
        }
    }

    #[test]
    fn derivative_orders_outside_the_range_are_rejected() {
        let e = EdgeworthExpansion::first_order(1.0);
        assert_eq!(
            e.derivative(0, 0.0),
            Err(EdgeworthError::BadDerivative { m: 0 })
        );
        assert_eq!(
            e.derivative(4, 0.0),
            Err(EdgeworthError::BadDerivative { m: 4 })
        );
    }

    #[test]
    fn matrix_form_wires_the_cumulant_coefficients() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| ((i * 5 + j) as f64 * 1.3).sin() * 2.0)
                    .collect()
            })
            .collect();
        let m = build_matrix(&rows).unwrap();
        let moms = moments(&m).unwrap();

        let e1 = expansion_matrix(&moms, 1).unwrap();
        assert_eq!(e1.order(), 1);
        assert_eq!(e1.skew(), moms.lambda1);
        assert_eq!(e1.excess(), 0.0);

        let e2 = expansion_matrix(&moms, 2).unwrap();
        assert_eq!(e2.skew(), moms.lambda1);
        assert_eq!(e2.excess(), moms.lambda2);

        assert_eq!(
            expansion_matrix(&moms, 3),
            Err(EdgeworthError::BadOrder { order: 3 })
        );
    }

    #[test]
    fn iid_form_divides_the_skewness_by_root_n() {
        let spec = IidSpec::new(&[(-2.0, 0.2), (0.5, 0.8)]).unwrap();
        let e = expansion_iid(&spec, 36).unwrap();
        assert_abs_diff_eq!(e.skew(), spec.mu3() / 6.0, epsilon = 1e-15);
        assert_eq!(expansion_iid(&spec, 0), Err(EdgeworthError::EmptySample));
    }

    #[test]
    fn iid_form_at_zero_shifts_by_the_density_over_n() {
        // mu3 = 1, n = 36: e(0) = Phi(0) + psi(0) / 36.
        let spec = IidSpec::new(&support_with_unit_third_moment()).unwrap();
        assert_abs_diff_eq!(spec.mu3(), 1.0, epsilon = 1e-12);
        let e = expansion_iid(&spec, 36).unwrap();
        assert_abs_diff_eq!(e.eval(0.0), 0.5110817300111509, epsilon = 1e-12);
    }

    /// A two-point law with mean 0, variance 1 and third moment exactly 1:
    /// values `(1 ± sqrt 5) / 2` with probabilities chosen to balance.
    fn support_with_unit_third_moment() -> Vec<(f64, f64)> {
        // For a two-point law at a < 0 < b with mean 0 and variance 1,
        // b = -1/a and mu3 = a + b; mu3 = 1 gives a^2 - a - 1 = 0.
        let a = (1.0 - 5f64.sqrt()) / 2.0;
        let b = -1.0 / a;
        let pa = b / (b - a);
        vec![(a, pa), (b, 1.0 - pa)]
    }

    #[test]
    fn symmetric_summands_leave_the_normal_cdf_untouched() {
        let spec = IidSpec::new(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let e = expansion_iid(&spec, 9).unwrap();
        for x in grid(-6.0, 6.0, 0.5) {
            assert_eq!(e.eval(x), phi(x));
        }
    }

    #[test]
    fn iid_correction_decays_like_root_n() {
        // |e_n(x) - Phi(x)| <= 0.4 * beta3 / (6 sqrt n) uniformly, since
        // |mu3| <= beta3 and sup |H_2 psi| < 0.4.
        let spec = IidSpec::new(&[(-2.0, 0.2), (0.5, 0.8)]).unwrap();
        for n in [1usize, 4, 25] {
            let e = expansion_iid(&spec, n).unwrap();
            let bound = 0.4 * spec.beta3() / (6.0 * (n as f64).sqrt());
            for x in grid(-8.0, 8.0, 0.05) {
                assert!((e.eval(x) - phi(x)).abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn first_moment_correction_is_the_weighted_density() {
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| ((i * 4 + j) as f64).cos()).collect())
            .collect();
        let m = build_matrix(&rows).unwrap();
        let moms = moments(&m).unwrap();
        let correction = expansion_first_moment(&moms);

        assert_abs_diff_eq!(correction(0.0), -psi(0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(correction(0.0), -0.39894228040143267, epsilon = 1e-15);
        assert!(correction(12.0).abs() < 1e-8);
        assert!(correction(-12.0).abs() < 1e-8);

        let z = 1.3;
        let by_hand = -psi(z) - z.powi(3) * psi(z) * moms.lambda1 / 6.0;
        assert_abs_diff_eq!(correction(z), by_hand, epsilon = 1e-15);
    }
}
