use crate::{MatrixError, ScoreMatrix};

/// Moment functionals of the standardized entries.
///
/// These are the quantities that control how close the law of the
/// standardized statistic is to the normal and to its Edgeworth corrections:
/// the error of the first-order expansion is driven by `d_cap^2 = delta / n`
/// and that of the second-order expansion by `e_cap^3 = eta / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixMoments {
    /// `beta = sum_ij |s_ij|^3` over the standardized entries `s`.
    pub beta: f64,
    /// `delta = sum_ij s_ij^4`.
    pub delta: f64,
    /// `eta = sum_ij |s_ij|^5`.
    pub eta: f64,
    /// `D = sqrt(delta / n)`.
    pub d_cap: f64,
    /// `E = (eta / n)^(1/3)`.
    pub e_cap: f64,
    /// Skewness coefficient `lambda1 = (1/n) sum_ij s_ij^3`.
    pub lambda1: f64,
    /// Fourth-order coefficient
    /// `lambda2 = (1/n) sum s^4 + 3/n - (3/n^2) sum_ijk (s_ij^2 s_ik^2 + s_ij^2 s_kj^2)`.
    pub lambda2: f64,
}

/// Computes [`MatrixMoments`] from the standardized entries of `m`.
///
/// The triple sums inside `lambda2` collapse to row and column sums of
/// squares: with `R_i = sum_j s_ij^2` and `C_j = sum_i s_ij^2`,
///
/// ```text
/// sum_ijk (s_ij^2 s_ik^2 + s_ij^2 s_kj^2) = sum_i R_i^2 + sum_j C_j^2,
/// ```
///
/// so the whole computation is O(n^2).
pub fn moments(m: &ScoreMatrix) -> Result<MatrixMoments, MatrixError> {
    let s = m.std_entries().ok_or(MatrixError::Degenerate)?;
    let n = m.n();
    let nf = n as f64;

    let mut beta = 0.0;
    let mut delta = 0.0;
    let mut eta = 0.0;
    let mut cubes = 0.0;
    let mut row_sq = vec![0.0; n];
    let mut col_sq = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let x = s[i * n + j];
            let x2 = x * x;
            let ax = x.abs();
            beta += ax * x2;
            delta += x2 * x2;
            eta += ax * x2 * x2;
            cubes += x * x2;
            row_sq[i] += x2;
            col_sq[j] += x2;
        }
    }
    let triple: f64 = row_sq.iter().map(|r| r * r).sum::<f64>()
        + col_sq.iter().map(|c| c * c).sum::<f64>();

    Ok(MatrixMoments {
        beta,
        delta,
        eta,
        d_cap: (delta / nf).sqrt(),
        e_cap: (eta / nf).cbrt(),
        lambda1: cubes / nf,
        lambda2: delta / nf + 3.0 / nf - 3.0 / (nf * nf) * triple,
    })
}
