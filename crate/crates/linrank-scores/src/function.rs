use crate::ScoreError;
use linrank_kernels::{normal_quantile, psi};
use std::fmt;
use std::sync::Arc;

const PROBE_POINTS: usize = 1024;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed forms available for exact scores of particular built-ins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ClosedForm {
    /// `J(t) = t`: exact scores are `j / (n + 1)`.
    Identity,
    /// `J = -1` below 1/2 and `+1` above: exact scores come from the
    /// binomial tail, where generic quadrature would not stabilize.
    StepAtHalf,
}

/// A score function `J` on the open unit interval, with an optional
/// analytic derivative and a hint for the growth-condition exponent.
#[derive(Clone)]
pub struct ScoreFunction {
    name: String,
    j: RealFn,
    j_prime: Option<RealFn>,
    alpha_hint: Option<f64>,
    closed_form: Option<ClosedForm>,
}

impl fmt::Debug for ScoreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreFunction")
            .field("name", &self.name)
            .field("has_derivative", &self.j_prime.is_some())
            .field("alpha_hint", &self.alpha_hint)
            .finish()
    }
}

impl ScoreFunction {
    pub fn new<F>(name: impl Into<String>, j: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScoreFunction {
            name: name.into(),
            j: Arc::new(j),
            j_prime: None,
            alpha_hint: None,
            closed_form: None,
        }
    }

    pub fn with_derivative<F>(mut self, j_prime: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.j_prime = Some(Arc::new(j_prime));
        self
    }

    pub fn with_alpha_hint(mut self, alpha: f64) -> Self {
        self.alpha_hint = Some(alpha);
        self
    }

    /// Wilcoxon family: `J(t) = t`.
    pub fn wilcoxon() -> Self {
        let mut f = ScoreFunction::new("wilcoxon", |t| t)
            .with_derivative(|_| 1.0)
            .with_alpha_hint(0.05);
        f.closed_form = Some(ClosedForm::Identity);
        f
    }

    /// Van der Waerden family: `J = Phi^{-1}`.
    pub fn van_der_waerden() -> Self {
        ScoreFunction::new("vdw", |t| {
            normal_quantile(t).expect("quantile arguments stay inside (0, 1)")
        })
        .with_derivative(|t| {
            let x = normal_quantile(t).expect("quantile arguments stay inside (0, 1)");
            1.0 / psi(x)
        })
        .with_alpha_hint(0.05)
    }

    /// Median family: `J(t) = -1` for `t < 1/2`, `+1` otherwise.
    pub fn median() -> Self {
        let mut f = ScoreFunction::new("median", |t| if t < 0.5 { -1.0 } else { 1.0 });
        f.closed_form = Some(ClosedForm::StepAtHalf);
        f
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha_hint(&self) -> Option<f64> {
        self.alpha_hint
    }

    pub(crate) fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.j)(t)
    }

    pub fn has_derivative(&self) -> bool {
        self.j_prime.is_some()
    }

    /// Analytic derivative if present, otherwise a central difference with
    /// the step shrunk to keep the stencil inside `(0, 1)`.
    pub fn slope(&self, t: f64) -> f64 {
        if let Some(d) = &self.j_prime {
            d(t)
        } else {
            let h = (1e-6_f64).min(t / 2.0).min((1.0 - t) / 2.0);
            ((self.j)(t + h) - (self.j)(t - h)) / (2.0 * h)
        }
    }

    /// Checks finiteness on the canonical grid `i / (N + 1)`, `N = 1024`.
    pub fn probe(&self) -> Result<(), ScoreError> {
        let denom = (PROBE_POINTS + 1) as f64;
        for i in 1..=PROBE_POINTS {
            let t = i as f64 / denom;
            if !self.eval(t).is_finite() {
                return Err(ScoreError::NonFiniteValue {
                    name: self.name.clone(),
                    t,
                });
            }
        }
        Ok(())
    }
}
