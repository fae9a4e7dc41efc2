/// A discrete distribution function: sorted atoms `(value, prob)` with a
/// right-continuous `eval`.
///
/// Values are strictly increasing after construction merges near-duplicates
/// (relative tolerance 1e-11, absolute 1e-14 near zero), so statistic
/// values that differ only by summation-order noise collapse to one atom.
/// The merge keeps the smallest value of a cluster as the representative
/// rather than averaging, so exact lattice values (a mass at 0, say)
/// survive bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    total: f64,
}

impl StepCdf {
    /// Builds the distribution from weighted values; weights need not be
    /// normalized. Values must be finite. Values closer together than the
    /// merge window collapse onto the smallest of the cluster, so exact
    /// lattice points survive bitwise.
    pub fn from_weighted(mut pairs: Vec<(f64, f64)>) -> StepCdf {
        debug_assert!(pairs.iter().all(|(v, w)| v.is_finite() && *w >= 0.0));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let weight_sum: f64 = pairs.iter().map(|(_, w)| w).sum();
        let scale = if weight_sum > 0.0 { 1.0 / weight_sum } else { 0.0 };

        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for (value, weight) in pairs {
            match atoms.last_mut() {
                Some((anchor, mass)) if value - *anchor <= merge_window(*anchor) => {
                    *mass += weight * scale;
                }
                _ => atoms.push((value, weight * scale)),
            }
        }

        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut run = 0.0;
        for (_, p) in &atoms {
            run += p;
            cumulative.push(run);
        }
        StepCdf {
            atoms,
            cumulative,
            total: run,
        }
    }

    /// Sorted atoms `(value, prob)`.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Total probability mass (1 up to accumulated rounding).
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Right-continuous distribution function: mass of `(-inf, z]`.
    pub fn eval(&self, z: f64) -> f64 {
        let idx = self.atoms.partition_point(|(v, _)| *v <= z);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// Left limit at `z`: mass of `(-inf, z)`, so `eval(z) - left_limit(z)`
    /// is the mass sitting exactly at `z`.
    pub fn left_limit(&self, z: f64) -> f64 {
        let idx = self.atoms.partition_point(|(v, _)| *v < z);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// Probability mass at `z` (nonzero only at merged atom values).
    pub fn mass_at(&self, z: f64) -> f64 {
        self.eval(z) - self.left_limit(z)
    }

    /// `E(V^k)` over the atoms.
    pub fn moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .map(|(v, p)| p * v.powi(k as i32))
            .sum()
    }

    /// Mean of the distribution.
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Variance of the distribution.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms
            .iter()
            .map(|(v, p)| p * (v - m) * (v - m))
            .sum()
    }
}

fn merge_window(anchor: f64) -> f64 {
    (1e-11 * anchor.abs()).max(1e-14)
}
