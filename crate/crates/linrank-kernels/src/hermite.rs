use crate::normal::psi;
use crate::KernelError;

/// Probabilists' Hermite polynomial `H_n(x)`.
///
/// Defined by `H_0 = 1`, `H_1 = x` and the recursion
/// `H_{n+1}(x) = -n H_{n-1}(x) + x H_n(x)`, so that
/// `(H_n(x) psi(x))' = -H_{n+1}(x) psi(x)`.
pub fn hermite(n: usize, x: f64) -> Result<f64, KernelError> {
    if n > 64 {
        return Err(KernelError::DegreeTooLarge { n, max: 64 });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for m in 1..n {
        let next = -(m as f64) * prev + x * cur;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Density-weighted Hermite polynomial `H_n(x) psi(x)`.
pub fn hermite_psi(n: usize, x: f64) -> Result<f64, KernelError> {
    Ok(hermite(n, x)? * psi(x))
}

/// Golden-section maximization of `g` on `[a, b]`, assuming a single interior
/// maximum in the bracket.
fn golden_max<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while b - a > 1e-12 {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g(x1);
        }
    }
    g1.max(g2)
}

/// Sup norm of `|H_n(x) psi(x)|` over the line, for `n <= 8`.
///
/// The weighted polynomial decays like `psi` for large `|x|`; the maximum is
/// located by a dense scan of `[-10, 10]` and refined by golden-section
/// search.
pub fn hermite_weighted_norm(n: usize) -> Result<f64, KernelError> {
    if n > 8 {
        return Err(KernelError::DegreeTooLarge { n, max: 8 });
    }
    let g = |x: f64| hermite_psi(n, x).unwrap().abs();
    let step = 0.002;
    let mut best_x = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    loop {
        let x = -10.0 + step * k as f64;
        if x > 10.0 {
            break;
        }
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
        k += 1;
    }
    Ok(best.max(golden_max(&g, best_x - 2.0 * step, best_x + 2.0 * step)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_gaussian;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_degree_closed_forms() {
        assert_eq!(hermite(0, 17.5).unwrap(), 1.0);
        for x in [-3.0, -0.7, 0.0, 0.4, 2.9] {
            assert_abs_diff_eq!(hermite(1, x).unwrap(), x, epsilon = 1e-14);
            assert_abs_diff_eq!(hermite(2, x).unwrap(), x * x - 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(hermite(3, x).unwrap(), x.powi(3) - 3.0 * x, epsilon = 1e-13);
            assert_abs_diff_eq!(
                hermite(4, x).unwrap(),
                x.powi(4) - 6.0 * x * x + 3.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                hermite(5, x).unwrap(),
                x.powi(5) - 10.0 * x.powi(3) + 15.0 * x,
                epsilon = 1e-12
            );
        }
        assert_eq!(hermite(4, 0.0).unwrap(), 3.0);
        assert_eq!(hermite(3, 1.0).unwrap(), -2.0);
    }

    #[test]
    fn degree_guard() {
        assert!(hermite(64, 0.5).is_ok());
        assert_eq!(
            hermite(65, 0.5),
            Err(KernelError::DegreeTooLarge { n: 65, max: 64 })
        );
        assert!(hermite_weighted_norm(9).is_err());
    }

    #[test]
    fn weighted_derivative_recursion() {
        // (H_n psi)' = -H_{n+1} psi, checked with central differences
        let h = 1e-6;
        for n in 0..6 {
            for x in [-2.3, -0.5, 0.0, 1.1, 3.7] {
                let numeric =
                    (hermite_psi(n, x + h).unwrap() - hermite_psi(n, x - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(numeric, -hermite_psi(n + 1, x).unwrap(), epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn weighted_polynomials_integrate_to_zero() {
        for n in 0..=6 {
            let v = integrate_gaussian(|y| hermite(n + 1, y).unwrap(), 1e-13);
            assert!(v.abs() < 1e-9, "degree {} integral {v}", n + 1);
        }
    }

    #[test]
    fn weighted_sup_norms() {
        let expected = [
            (0usize, 0.39894),
            (1, 0.24197),
            (2, 0.39894),
            (3, 0.55059),
            (4, 1.19683),
            (5, 2.30711),
            (6, 5.98413),
            (8, 41.88894),
        ];
        for (n, norm) in expected {
            assert_abs_diff_eq!(hermite_weighted_norm(n).unwrap(), norm, epsilon = 5e-5);
        }
        // the cubic weighted norm peaks at sqrt(3 - sqrt 6)
        let peak = (3.0 - 6.0f64.sqrt()).sqrt();
        assert_abs_diff_eq!(
            hermite_psi(3, peak).unwrap().abs(),
            hermite_weighted_norm(3).unwrap(),
            epsilon = 1e-9
        );
    }
}
