//! Integral identities tying the Stein solutions to the Gaussian weight.

use linrank_kernels::{integrate, psi, stein_f, SteinSolution};

/// Central difference of the indicator Stein solution, with the step shrunk
/// near the kink at `z` so the stencil never straddles it.
fn fd_f_prime(z: f64, y: f64) -> f64 {
    let h = (1e-5_f64).min((y - z).abs() / 4.0).max(1e-9);
    (stein_f(0, z, y + h).unwrap() - stein_f(0, z, y - h).unwrap()) / (2.0 * h)
}

fn weighted_first_moment<D>(z: f64, deriv: D, tol: f64) -> f64
where
    D: Fn(f64) -> f64,
{
    // split at the kink so each quadrature panel sees a smooth integrand
    integrate(|y| deriv(y) * y * psi(y), -12.0, z, tol)
        + integrate(|y| deriv(y) * y * psi(y), z, 12.0, tol)
}

/// `int f'(y) y psi(y) dy = (z^2 - 1) psi(z) / 3` for the indicator target,
/// with the derivative taken by finite differences of the solution values.
#[test]
fn first_moment_identity_from_finite_differences() {
    for z in [-1.0, 0.0, 2.0] {
        let lhs = weighted_first_moment(z, |y| fd_f_prime(z, y), 1e-9);
        let rhs = (z * z - 1.0) * psi(z) / 3.0;
        assert!(
            (lhs - rhs).abs() < 1e-6,
            "z = {z}: lhs = {lhs}, rhs = {rhs}"
        );
    }
}

/// Same identity with the derivative read off the Stein equation, which
/// removes the differencing noise and tightens the tolerance.
#[test]
fn first_moment_identity_from_the_equation() {
    for z in [-1.0, 0.0, 2.0] {
        let s = SteinSolution::new(0, z).unwrap();
        let lhs = weighted_first_moment(z, |y| s.f_prime(y), 1e-12);
        let rhs = (z * z - 1.0) * psi(z) / 3.0;
        assert!(
            (lhs - rhs).abs() < 1e-9,
            "z = {z}: lhs = {lhs}, rhs = {rhs}"
        );
    }
}
