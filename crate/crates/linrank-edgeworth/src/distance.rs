use linrank_perm::StepCdf;

use crate::EdgeworthError;

/// Interior probes per gap between consecutive atoms.
const GAP_PROBES: usize = 8;

/// A smooth comparand is treated as settled at its limits beyond this.
const TAIL_EDGE: f64 = 12.0;

/// Points of the geometric grid the smoothness constant is taken over.
const Y_POINTS: i32 = 64;

/// Sup-norm distance between a discrete law and a smooth comparand.
///
/// The supremum is taken over the atoms (comparing both the value and the
/// left limit of the law), the tail points at +-12, and `GAP_PROBES`
/// interior probes per gap, where the law is flat. For a comparand that
/// is monotone between atoms the atom checks alone are already exact; the
/// probes additionally bound the sup for comparands with interior bumps,
/// like heavily corrected expansions.
pub fn sup_distance(law: &StepCdf, comparand: impl Fn(f64) -> f64) -> f64 {
    let mut best = (law.eval(-TAIL_EDGE) - comparand(-TAIL_EDGE)).abs();
    best = best.max((law.eval(TAIL_EDGE) - comparand(TAIL_EDGE)).abs());

    for &(z, _) in law.atoms() {
        let e = comparand(z);
        best = best.max((law.eval(z) - e).abs());
        best = best.max((law.left_limit(z) - e).abs());
    }

    let mut breaks: Vec<f64> = Vec::with_capacity(law.atoms().len() + 2);
    let first = law.atoms().first().map_or(TAIL_EDGE, |a| a.0);
    let last = law.atoms().last().map_or(-TAIL_EDGE, |a| a.0);
    breaks.push((-TAIL_EDGE).min(first));
    breaks.extend(law.atoms().iter().map(|a| a.0));
    breaks.push(TAIL_EDGE.max(last));

    for window in breaks.windows(2) {
        let (lo, hi) = (window[0], window[1]);
        let flat = law.eval(lo);
        for j in 1..=GAP_PROBES {
            let t = lo + (hi - lo) * j as f64 / (GAP_PROBES + 1) as f64;
            best = best.max((flat - comparand(t)).abs());
        }
    }
    best
}

/// Empirical second-difference smoothness constant of a discrete law:
///
/// ```text
/// sup |F(z + 2y) - 2 F(z + y) + F(z)| / (scale^2 + y^2)
/// ```
///
/// over a 64-point geometric grid of `y` in `(scale/64, scale]` and all
/// `z` adjacent to an atom (`z = atom - j y`, `j` in `0..3`, evaluated
/// both right-continuously and as left limits). A law close to a smooth
/// distribution keeps the constant near `sup |Phi''| / 2`; a lattice law
/// lets it grow with the central jump over `scale^2`, which is how the
/// diagnostics detect laws too coarse for a uniform expansion bound.
pub fn delta2_condition(law: &StepCdf, scale: f64) -> Result<f64, EdgeworthError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(EdgeworthError::BadScale { scale });
    }
    let mut best = 0.0f64;
    for i in 1..=Y_POINTS {
        let y = scale * 64f64.powf(-f64::from(Y_POINTS - i) / f64::from(Y_POINTS));
        let weight = 1.0 / (scale * scale + y * y);
        for &(v, _) in law.atoms() {
            for j in 0..3 {
                let z = v - j as f64 * y;
                let step = law.eval(z + 2.0 * y) - 2.0 * law.eval(z + y) + law.eval(z);
                let left = law.left_limit(z + 2.0 * y) - 2.0 * law.left_limit(z + y)
                    + law.left_limit(z);
                best = best.max(step.abs() * weight).max(left.abs() * weight);
            }
        }
    }
    Ok(best)
}
