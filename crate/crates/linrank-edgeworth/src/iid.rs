use std::collections::BTreeMap;

use linrank_perm::StepCdf;

use crate::EdgeworthError;

/// Largest number of summands [`iid_convolution`] will convolve.
pub const MAX_SUMMANDS: usize = 4096;

/// Default cap on the convolved support size.
pub const DEFAULT_ATOM_CAP: usize = 4_000_000;

/// A standardized summand law: finite support with mean 0 and second
/// moment 1, plus the third and fourth moment summaries the expansions
/// and error constants need.
#[derive(Debug, Clone, PartialEq)]
pub struct IidSpec {
    support: Vec<(f64, f64)>,
    mu3: f64,
    beta3: f64,
    beta4: f64,
}

impl IidSpec {
    /// Validates and normalizes a support given as `(value, weight)`.
    ///
    /// Weights need not sum to 1; zero-weight atoms are dropped. The
    /// normalized law must satisfy `E X = 0` and `E X^2 = 1`, both to
    /// 1e-12.
    pub fn new(support: &[(f64, f64)]) -> Result<IidSpec, EdgeworthError> {
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(support.len());
        for &(value, weight) in support {
            if !value.is_finite() || !weight.is_finite() || weight < 0.0 {
                return Err(EdgeworthError::BadSupport);
            }
            if weight > 0.0 {
                atoms.push((value, weight));
            }
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if atoms.is_empty() || !total.is_finite() || total <= 0.0 {
            return Err(EdgeworthError::BadSupport);
        }
        for (_, w) in &mut atoms {
            *w /= total;
        }

        let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
        let second: f64 = atoms.iter().map(|(v, p)| v * v * p).sum();
        if mean.abs() > 1e-12 || (second - 1.0).abs() > 1e-12 {
            return Err(EdgeworthError::NotCentered {
                mean,
                second_moment: second,
            });
        }

        Ok(IidSpec {
            mu3: atoms.iter().map(|(v, p)| v.powi(3) * p).sum(),
            beta3: atoms.iter().map(|(v, p)| v.abs().powi(3) * p).sum(),
            beta4: atoms.iter().map(|(v, p)| v.powi(4) * p).sum(),
            support: atoms,
        })
    }

    /// The fair `-1 / +1` coin, the canonical lattice summand.
    pub fn rademacher() -> IidSpec {
        IidSpec::new(&[(-1.0, 0.5), (1.0, 0.5)]).expect("the fair sign law is standardized")
    }

    /// Normalized support `(value, prob)`.
    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// Third moment `E X^3`.
    pub fn mu3(&self) -> f64 {
        self.mu3
    }

    /// Absolute third moment `E |X|^3`.
    pub fn beta3(&self) -> f64 {
        self.beta3
    }

    /// Fourth moment `E X^4`.
    pub fn beta4(&self) -> f64 {
        self.beta4
    }
}

/// Exact law of the standardized sum `(X_1 + ... + X_n) / sqrt(n)` with
/// the default atom cap. See [`iid_convolution_with_cap`].
pub fn iid_convolution(spec: &IidSpec, n: usize) -> Result<StepCdf, EdgeworthError> {
    iid_convolution_with_cap(spec, n, DEFAULT_ATOM_CAP)
}

/// Exact law of the standardized sum by repeated squaring of the summand
/// law under convolution.
///
/// An all-integer support runs on an exact `i64` lattice, so dyadic
/// probabilities (the fair coin, say) come out bitwise exact. Any other
/// support falls back to sorting and merging values that agree to within
/// the [`StepCdf`] clustering window. Either way a convolution whose
/// support would exceed `cap` atoms aborts with
/// [`EdgeworthError::TooManyAtoms`].
pub fn iid_convolution_with_cap(
    spec: &IidSpec,
    n: usize,
    cap: usize,
) -> Result<StepCdf, EdgeworthError> {
    if n == 0 {
        return Err(EdgeworthError::EmptySample);
    }
    if n > MAX_SUMMANDS {
        return Err(EdgeworthError::TooLarge {
            n,
            max: MAX_SUMMANDS,
        });
    }
    let scale = 1.0 / (n as f64).sqrt();
    let pairs = match integer_support(spec.support()) {
        Some(lattice) => integer_power(&lattice, n, cap)?
            .into_iter()
            .map(|(k, p)| (k as f64 * scale, p))
            .collect(),
        None => float_power(spec.support(), n, cap)?
            .into_iter()
            .map(|(v, p)| (v * scale, p))
            .collect(),
    };
    Ok(StepCdf::from_weighted(pairs))
}

/// Constant of the uniform error bound for iid sums,
/// `(2 + beta4) c + 3 + 11 beta3 + 13 beta4 + 9 beta3 beta4`,
/// where `c` is the second-difference smoothness constant of the summand
/// law (see [`delta2_condition`](crate::delta2_condition)).
pub fn iid_error_constant(c: f64, beta3: f64, beta4: f64) -> Result<f64, EdgeworthError> {
    let valid = c.is_finite() && c > 0.0 && beta3.is_finite() && beta3 >= 1.0 && beta4.is_finite() && beta4 >= 1.0;
    if !valid {
        return Err(EdgeworthError::BadConstant);
    }
    Ok((2.0 + beta4) * c + 3.0 + 11.0 * beta3 + 13.0 * beta4 + 9.0 * beta3 * beta4)
}

/// The support as exact `i64` lattice points, if every value is one.
fn integer_support(support: &[(f64, f64)]) -> Option<Vec<(i64, f64)>> {
    const LIMIT: f64 = 1e12;
    support
        .iter()
        .map(|&(v, p)| (v.fract() == 0.0 && v.abs() <= LIMIT).then_some((v as i64, p)))
        .collect()
}

/// Law of the `n`-fold sum on the integer lattice, by binary doubling.
fn integer_power(
    base: &[(i64, f64)],
    n: usize,
    cap: usize,
) -> Result<BTreeMap<i64, f64>, EdgeworthError> {
    let mut acc = BTreeMap::from([(0i64, 1.0)]);
    let mut square: BTreeMap<i64, f64> = base.iter().copied().collect();
    let mut exp = n;
    loop {
        if exp & 1 == 1 {
            acc = integer_conv(&acc, &square, cap)?;
        }
        exp >>= 1;
        if exp == 0 {
            return Ok(acc);
        }
        square = integer_conv(&square, &square, cap)?;
    }
}

fn integer_conv(
    a: &BTreeMap<i64, f64>,
    b: &BTreeMap<i64, f64>,
    cap: usize,
) -> Result<BTreeMap<i64, f64>, EdgeworthError> {
    let mut out = BTreeMap::new();
    for (&ka, &pa) in a {
        for (&kb, &pb) in b {
            *out.entry(ka + kb).or_insert(0.0) += pa * pb;
        }
    }
    if out.len() > cap {
        return Err(EdgeworthError::TooManyAtoms {
            atoms: out.len(),
            cap,
        });
    }
    Ok(out)
}

/// Law of the `n`-fold sum for general supports: sorted values, adjacent
/// near-duplicates merged.
fn float_power(
    base: &[(f64, f64)],
    n: usize,
    cap: usize,
) -> Result<Vec<(f64, f64)>, EdgeworthError> {
    let mut acc = vec![(0.0, 1.0)];
    let mut square = base.to_vec();
    square.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut exp = n;
    loop {
        if exp & 1 == 1 {
            acc = float_conv(&acc, &square, cap)?;
        }
        exp >>= 1;
        if exp == 0 {
            return Ok(acc);
        }
        square = float_conv(&square, &square, cap)?;
    }
}

fn float_conv(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    cap: usize,
) -> Result<Vec<(f64, f64)>, EdgeworthError> {
    let product = a.len().saturating_mul(b.len());
    if product > cap {
        return Err(EdgeworthError::TooManyAtoms {
            atoms: product,
            cap,
        });
    }
    let mut pairs = Vec::with_capacity(product);
    for &(va, pa) in a {
        for &(vb, pb) in b {
            pairs.push((va + vb, pa * pb));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut out: Vec<(f64, f64)> = Vec::new();
    for (value, prob) in pairs {
        match out.last_mut() {
            Some((anchor, mass)) if value - *anchor <= 1e-11 * anchor.abs().max(1e-3) => {
                *mass += prob;
            }
            _ => out.push((value, prob)),
        }
    }
    Ok(out)
}
