use crate::normal::{mills, phi, psi, upper_tail};
use crate::KernelError;

const MAX_MOMENT: usize = 4;

/// Polynomial envelope `eta_k(a)` for the Stein solutions below.
///
/// For `a >= 0`,
///
/// ```text
/// eta_k(a) = a^{k-1} + (k-1) a^{k-3} + (k-1)(k-3) a^{k-5} + ...
/// ```
///
/// terminating in the double-factorial constant `(k-1)(k-3)...`; empty sums
/// and products make `eta_0 = eta_1 = 1`. It dominates the solution of the
/// `k`-th truncated-moment Stein equation: `|f_k(x)| <= eta_k(|x|)`.
pub fn eta(k: usize, a: f64) -> f64 {
    let half = k / 2;
    let mut total = 0.0;
    for i in 1..=half {
        let mut term = a.powi((k + 1 - 2 * i) as i32);
        for j in 1..i {
            term *= (k + 1 - 2 * j) as f64;
        }
        total += term;
    }
    total + tail_constant(k)
}

/// `(k-1)(k-3)... = prod_{j=1}^{floor(k/2)} (k + 1 - 2j)`.
fn tail_constant(k: usize) -> f64 {
    (1..=k / 2).map(|j| (k + 1 - 2 * j) as f64).product()
}

/// `E |V|^k` for a standard normal `V`.
fn abs_moment_total(k: usize) -> f64 {
    if k % 2 == 1 {
        tail_constant(k) * (2.0 / std::f64::consts::PI).sqrt()
    } else {
        tail_constant(k)
    }
}

/// Upper truncated moment over the density:
/// `int_t^inf u^k psi(u) du / psi(t)` for `t >= 0`.
///
/// Integration by parts gives the recursion `m_k = t^{k-1} + (k-1) m_{k-2}`
/// with `m_1 = 1` and `m_0 = mills(t)`; unrolled, this is `eta_k(t)` for odd
/// `k`, while even `k` carry a single Mills-ratio term.
fn m_over_psi(k: usize, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if k % 2 == 1 {
        eta(k, t)
    } else {
        let c = tail_constant(k);
        (eta(k, t) - c) + c * mills(t)
    }
}

/// Lower truncated absolute moment `M_k(z) = E(|V|^k 1(V <= z))`.
pub fn truncated_abs_moment(k: usize, z: f64) -> f64 {
    if z <= 0.0 {
        m_over_psi(k, -z) * psi(z)
    } else {
        abs_moment_total(k) - m_over_psi(k, z) * psi(z)
    }
}

fn f_value(k: usize, z: f64, x: f64) -> f64 {
    let target = truncated_abs_moment(k, z);
    if x <= z {
        if x <= 0.0 {
            m_over_psi(k, -x) - target * mills(-x)
        } else {
            // 0 < x <= z, so the exponent is nonpositive
            m_over_psi(k, z) * ((x * x - z * z) * 0.5).exp() + target * mills(x)
                - m_over_psi(k, x)
        }
    } else if x >= 0.0 {
        target * mills(x)
    } else {
        // z < x < 0, so |x| < |z| and the exponent is nonpositive
        m_over_psi(k, -z) * ((x * x - z * z) * 0.5).exp() * upper_tail(x)
    }
}

/// The bounded solution of Stein's equation
///
/// ```text
/// f'(x) - x f(x) = |x|^k 1(x <= z) - E(|V|^k 1(V <= z))
/// ```
///
/// for a fixed moment order `k <= 4` and threshold `z`. Values and
/// derivatives are evaluated through branch formulas that only involve the
/// Mills ratio and exponentials of nonpositive arguments, so they stay
/// finite for thresholds far into either tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinSolution {
    k: usize,
    z: f64,
}

impl SteinSolution {
    pub fn new(k: usize, z: f64) -> Result<Self, KernelError> {
        if k > MAX_MOMENT {
            return Err(KernelError::MomentOrderOutOfRange { k, max: MAX_MOMENT });
        }
        Ok(SteinSolution { k, z })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Target constant `E(|V|^k 1(V <= z))`.
    pub fn target_moment(&self) -> f64 {
        truncated_abs_moment(self.k, self.z)
    }

    /// Solution value `f_k(x)`.
    pub fn f(&self, x: f64) -> f64 {
        f_value(self.k, self.z, x)
    }

    /// Derivative `f_k'(x)`, read off from the equation itself. At `x = z`
    /// this is the left derivative (the indicator is taken as 1).
    pub fn f_prime(&self, x: f64) -> f64 {
        let indicator = if x <= self.z {
            x.abs().powi(self.k as i32)
        } else {
            0.0
        };
        x * self.f(x) + indicator - self.target_moment()
    }
}

/// Convenience form of [`SteinSolution::f`].
pub fn stein_f(k: usize, z: f64, x: f64) -> Result<f64, KernelError> {
    Ok(SteinSolution::new(k, z)?.f(x))
}

/// Convenience form of [`SteinSolution::f_prime`].
pub fn stein_f_prime(k: usize, z: f64, x: f64) -> Result<f64, KernelError> {
    Ok(SteinSolution::new(k, z)?.f_prime(x))
}

/// Solution of Stein's equation for the signed first-moment target:
///
/// ```text
/// f'(x) - x f(x) = x 1(x <= z) + psi(z)
/// ```
///
/// (the right side is centred because `E(V 1(V <= z)) = -psi(z)`).
pub fn stein_f1(z: f64, x: f64) -> f64 {
    if x <= z {
        if x <= 0.0 {
            psi(z) * mills(-x) - 1.0
        } else {
            phi(x) * ((x * x - z * z) * 0.5).exp() - 1.0
        }
    } else if x >= 0.0 {
        -psi(z) * mills(x)
    } else {
        -upper_tail(x) * ((x * x - z * z) * 0.5).exp()
    }
}

/// Derivative of [`stein_f1`], read off from its equation; the left
/// derivative at `x = z`.
pub fn stein_f1_prime(z: f64, x: f64) -> f64 {
    let indicator = if x <= z { x } else { 0.0 };
    x * stein_f1(z, x) + indicator + psi(z)
}
