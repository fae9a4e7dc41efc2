use crate::quad::integrate;
use crate::KernelError;

const MAX_ORDER: u32 = 3;

/// Shape of the smoothed step: each kind equals 1 left of `z`, decays
/// polynomially to 0 over `pieces` intervals of width `lambda`, and is as
/// smooth as its degree allows (`C^0`, `C^1`, `C^2` respectively).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Linear decay on `[z, z + lambda]`.
    Linear,
    /// Quadratic spline decay on `[z, z + 2 lambda]`.
    Quadratic,
    /// Cubic spline decay on `[z, z + 3 lambda]`.
    Cubic,
}

impl KernelKind {
    fn pieces(self) -> u32 {
        match self {
            KernelKind::Linear => 1,
            KernelKind::Quadratic => 2,
            KernelKind::Cubic => 3,
        }
    }

    /// Highest derivative order that exists everywhere.
    fn smoothness(self) -> u32 {
        self.pieces() - 1
    }
}

/// Polynomial prefactor multiplying the step shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerFactor {
    /// `x^m`.
    Power(u32),
    /// `|x|^k`; for odd `k` this has only `k - 1` derivatives at the origin.
    AbsPower(u32),
}

/// Product of a power factor and a smoothed indicator of `(-inf, z]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothKernel {
    kind: KernelKind,
    z: f64,
    lambda: f64,
    factor: PowerFactor,
}

impl SmoothKernel {
    pub fn new(
        kind: KernelKind,
        z: f64,
        lambda: f64,
        factor: PowerFactor,
    ) -> Result<Self, KernelError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(KernelError::InvalidWidth { lambda });
        }
        Ok(SmoothKernel {
            kind,
            z,
            lambda,
            factor,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn factor(&self) -> PowerFactor {
        self.factor
    }

    fn is_shape_knot(&self, x: f64) -> bool {
        (0..=self.kind.pieces()).any(|i| x == self.z + f64::from(i) * self.lambda)
    }
}

/// Derivative of the step shape with respect to `t = (x - z) / lambda`.
///
/// Boundary `t` values are folded into whichever adjacent piece the ladder
/// hits first; for orders up to the kind's smoothness both pieces agree
/// there, and higher orders are rejected at knots before reaching this.
fn shape_derivative(kind: KernelKind, t: f64, order: u32) -> f64 {
    match kind {
        KernelKind::Linear => match order {
            0 => {
                if t <= 0.0 {
                    1.0
                } else if t < 1.0 {
                    1.0 - t
                } else {
                    0.0
                }
            }
            1 if t > 0.0 && t < 1.0 => -1.0,
            _ => 0.0,
        },
        KernelKind::Quadratic => match order {
            0 => {
                if t <= 0.0 {
                    1.0
                } else if t <= 1.0 {
                    1.0 - 0.5 * t * t
                } else if t < 2.0 {
                    0.5 * (2.0 - t) * (2.0 - t)
                } else {
                    0.0
                }
            }
            1 => {
                if t <= 0.0 {
                    0.0
                } else if t <= 1.0 {
                    -t
                } else if t <= 2.0 {
                    -(2.0 - t)
                } else {
                    0.0
                }
            }
            2 => {
                if t > 0.0 && t < 1.0 {
                    -1.0
                } else if t > 1.0 && t < 2.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 0.0,
        },
        KernelKind::Cubic => {
            let s = t - 1.0;
            match order {
                0 => {
                    if t <= 0.0 {
                        1.0
                    } else if t <= 1.0 {
                        1.0 - t * t * t / 6.0
                    } else if t <= 2.0 {
                        5.0 / 6.0 - 0.5 * s - 0.5 * s * s + s * s * s / 3.0
                    } else if t < 3.0 {
                        (3.0 - t) * (3.0 - t) * (3.0 - t) / 6.0
                    } else {
                        0.0
                    }
                }
                1 => {
                    if t <= 0.0 {
                        0.0
                    } else if t <= 1.0 {
                        -0.5 * t * t
                    } else if t <= 2.0 {
                        -0.5 - s + s * s
                    } else if t <= 3.0 {
                        -0.5 * (3.0 - t) * (3.0 - t)
                    } else {
                        0.0
                    }
                }
                2 => {
                    if t <= 0.0 {
                        0.0
                    } else if t <= 1.0 {
                        -t
                    } else if t <= 2.0 {
                        -1.0 + 2.0 * s
                    } else if t <= 3.0 {
                        3.0 - t
                    } else {
                        0.0
                    }
                }
                3 => {
                    if t > 0.0 && t < 1.0 {
                        -1.0
                    } else if t > 1.0 && t < 2.0 {
                        2.0
                    } else if t > 2.0 && t < 3.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            }
        }
    }
}

/// Derivative of the power factor; orders past the singular one at the
/// origin are rejected before reaching this.
fn factor_derivative(factor: PowerFactor, x: f64, order: u32) -> f64 {
    let (k, odd_abs) = match factor {
        PowerFactor::Power(m) => (m, false),
        PowerFactor::AbsPower(k) => (k, k % 2 == 1),
    };
    if order > k {
        return 0.0;
    }
    let falling: f64 = (0..order).map(|j| f64::from(k - j)).product();
    let value = falling * x.powi((k - order) as i32);
    if odd_abs && x < 0.0 {
        -value
    } else {
        value
    }
}

/// Kernel value `factor(x) * shape((x - z) / lambda)`.
pub fn smooth_eval(kern: &SmoothKernel, x: f64) -> f64 {
    let t = (x - kern.z) / kern.lambda;
    factor_derivative(kern.factor, x, 0) * shape_derivative(kern.kind, t, 0)
}

/// Derivative of [`smooth_eval`] of the given order (at most 3).
///
/// Orders past the shape's smoothness are one-sided limits and are rejected
/// exactly at the shape's knots; for an odd absolute power `|x|^k`, orders
/// `>= k` are likewise rejected exactly at the origin.
pub fn smooth_derivative(kern: &SmoothKernel, x: f64, order: u32) -> Result<f64, KernelError> {
    if order > MAX_ORDER {
        return Err(KernelError::UnsupportedDerivative { order });
    }
    if order > kern.kind.smoothness() && kern.is_shape_knot(x) {
        return Err(KernelError::DerivativeAtKnot { x, order });
    }
    if let PowerFactor::AbsPower(k) = kern.factor {
        if k % 2 == 1 && order >= k && x == 0.0 {
            return Err(KernelError::DerivativeAtKnot { x, order });
        }
    }
    let t = (x - kern.z) / kern.lambda;
    let binom: &[f64] = match order {
        0 => &[1.0],
        1 => &[1.0, 1.0],
        2 => &[1.0, 2.0, 1.0],
        _ => &[1.0, 3.0, 3.0, 1.0],
    };
    let mut total = 0.0;
    for (j, &c) in binom.iter().enumerate() {
        let shape_order = order - j as u32;
        let scale = kern.lambda.powi(-(shape_order as i32));
        total += c
            * factor_derivative(kern.factor, x, j as u32)
            * shape_derivative(kern.kind, t, shape_order)
            * scale;
    }
    Ok(total)
}

/// Integrals of the cubic kernel's first derivative against the three
/// reference polynomials `1`, `(x - z)/lambda`, and
/// `(x - z)(x - z - lambda)/(2 lambda^2)` over its decay interval
/// `[z, z + 3 lambda]`. The triple is `(-1, -3/2, -1/2)` for every `(z,
/// lambda)`; exposing it as a computation keeps the quadrature honest.
pub fn r_moment_integrals(z: f64, lambda: f64) -> Result<(f64, f64, f64), KernelError> {
    let kern = SmoothKernel::new(KernelKind::Cubic, z, lambda, PowerFactor::Power(0))?;
    let weights: [Box<dyn Fn(f64) -> f64>; 3] = [
        Box::new(|_| 1.0),
        Box::new(move |x| (x - z) / lambda),
        Box::new(move |x| (x - z) * (x - z - lambda) / (2.0 * lambda * lambda)),
    ];
    let mut out = [0.0_f64; 3];
    for (slot, w) in out.iter_mut().zip(weights.iter()) {
        // integrate piecewise so every quadrature panel is a polynomial
        for i in 0..3u32 {
            let a = z + f64::from(i) * lambda;
            *slot += integrate(
                |x| smooth_derivative(&kern, x, 1).expect("interior points only") * w(x),
                a,
                a + lambda,
                1e-13,
            );
        }
    }
    Ok((out[0], out[1], out[2]))
}
