use crate::KernelError;

const MAX_STENCIL: usize = 8;

/// `k`-th forward difference of `f` with step `y`, anchored at `z`:
///
/// ```text
/// sum_{j=0}^{k} (-1)^{k-j} C(k, j) f(z + j y)
/// ```
///
/// Annihilates polynomials of degree below `k` and maps `x^k` to `k! y^k`.
pub fn difference<F>(f: F, y: f64, k: usize, z: f64) -> Result<f64, KernelError>
where
    F: Fn(f64) -> f64,
{
    if k == 0 || k > MAX_STENCIL {
        return Err(KernelError::DifferenceOrderOutOfRange { k });
    }
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * binom * f(z + j as f64 * y);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    Ok(total)
}

/// Degree-`k` polynomial interpolating `f` at the equally spaced nodes
/// `z, z + y, ..., z + k y`, evaluated at `x` (Newton forward form):
///
/// ```text
/// P(x) = sum_{j=0}^{k} diff^j f(z) / (j! y^j) * prod_{i<j} (x - z - i y)
/// ```
///
/// Coincident nodes (`y = 0` with `k >= 1`) are rejected rather than
/// collapsed to `f(z)`, to surface caller bugs.
pub fn interp_poly<F>(f: F, y: f64, k: usize, z: f64, x: f64) -> Result<f64, KernelError>
where
    F: Fn(f64) -> f64,
{
    if k > MAX_STENCIL {
        return Err(KernelError::InterpDegreeTooLarge { k });
    }
    if k >= 1 && y == 0.0 {
        return Err(KernelError::DegenerateStep { k });
    }
    let mut level: Vec<f64> = (0..=k).map(|m| f(z + m as f64 * y)).collect();
    let mut total = level[0];
    let mut basis = 1.0;
    let mut step = 1.0;
    for j in 1..=k {
        basis *= x - z - (j - 1) as f64 * y;
        step *= j as f64 * y;
        for i in 0..=(k - j) {
            level[i] = level[i + 1] - level[i];
        }
        total += level[0] / step * basis;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::phi;
    use approx::assert_abs_diff_eq;

    #[test]
    fn second_difference_of_a_quadratic() {
        for z in [0.0, 3.7, -11.0] {
            for y in [0.5, -1.2] {
                let d = difference(|x| x * x, y, 2, z).unwrap();
                assert_abs_diff_eq!(d, 2.0 * y * y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_difference_is_a_step() {
        let d = difference(f64::sin, 0.3, 1, 1.1).unwrap();
        assert_abs_diff_eq!(d, (1.4_f64).sin() - (1.1_f64).sin(), epsilon = 1e-15);
    }

    #[test]
    fn zero_step_collapses_to_zero() {
        for k in 1..=8 {
            let d = difference(phi, 0.0, k, 0.3).unwrap();
            assert!(d.abs() < 1e-14, "k = {k}: {d}");
        }
    }

    #[test]
    fn difference_annihilates_low_degrees_and_scales_the_top_one() {
        let y = 0.7;
        let cubic_under_fourth = difference(|x| x.powi(3), y, 4, -2.0).unwrap();
        assert!(cubic_under_fourth.abs() < 1e-9);
        let quartic = difference(|x| x.powi(4), y, 4, -2.0).unwrap();
        assert_abs_diff_eq!(quartic, 24.0 * y.powi(4), epsilon = 1e-9);
    }

    #[test]
    fn difference_order_guards() {
        assert_eq!(
            difference(f64::sin, 1.0, 0, 0.0),
            Err(KernelError::DifferenceOrderOutOfRange { k: 0 })
        );
        assert_eq!(
            difference(f64::sin, 1.0, 9, 0.0),
            Err(KernelError::DifferenceOrderOutOfRange { k: 9 })
        );
    }

    #[test]
    fn degree_zero_interpolation_is_constant() {
        for x in [-5.0, 0.0, 17.3] {
            assert_eq!(interp_poly(f64::sin, 0.0, 0, 1.2, x).unwrap(), (1.2_f64).sin());
        }
    }

    #[test]
    fn cubic_polynomials_reproduce_exactly() {
        let f = |x: f64| 2.0 * x.powi(3) - x + 0.5;
        for j in 0..=60 {
            let x = -3.0 + 0.1 * j as f64;
            let p = interp_poly(f, 0.7, 3, -1.0, x).unwrap();
            assert_abs_diff_eq!(p, f(x), epsilon = 1e-9);
        }
    }

    #[test]
    fn nodes_are_reproduced() {
        for k in [2usize, 5] {
            let z = 0.4;
            let y = 0.25;
            let p = interp_poly(f64::sin, y, k, z, z + 2.0 * y).unwrap();
            assert_abs_diff_eq!(p, (z + 2.0 * y).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_guards() {
        assert_eq!(
            interp_poly(f64::sin, 0.0, 3, 0.0, 1.0),
            Err(KernelError::DegenerateStep { k: 3 })
        );
        assert_eq!(
            interp_poly(f64::sin, 0.5, 9, 0.0, 1.0),
            Err(KernelError::InterpDegreeTooLarge { k: 9 })
        );
    }
}
