use crate::PermError;
use linrank_matrix::ScoreMatrix;

/// Leading-term moment approximations with hard remainder bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentsSimplified {
    /// `(1/n) sum s_ij^3` over the standardized entries.
    pub third: f64,
    /// The exact third moment differs from `third` by at most this.
    pub third_remainder_bound: f64,
    /// `3 + (1/n) sum s_ij^4 + 3/n - (3/n^2)(row and column square sums)`.
    pub fourth: f64,
    /// The exact fourth moment differs from `fourth` by at most this.
    pub fourth_remainder_bound: f64,
}

/// Exact third moment of the standardized statistic, `n >= 3`.
pub fn third_moment_exact(m: &ScoreMatrix) -> Result<f64, PermError> {
    let n = m.n();
    if n < 3 {
        return Err(PermError::TooSmall { n, min: 3 });
    }
    let s = m.std_entries().ok_or(PermError::Degenerate)?;
    let nf = n as f64;
    let sum_cubes: f64 = s.iter().map(|&x| x * x * x).sum();
    Ok(nf / ((nf - 1.0) * (nf - 2.0)) * sum_cubes)
}

/// Exact third and fourth moments of the standardized statistic, `n >= 4`.
///
/// The quadruple contraction `sum_{i,j,k,h} s_ik s_ih s_jk s_jh` is the
/// squared Frobenius norm of the Gram matrix `S^T S`, computed in O(n^3).
pub fn moments_exact(m: &ScoreMatrix) -> Result<(f64, f64), PermError> {
    let n = m.n();
    if n < 4 {
        return Err(PermError::TooSmall { n, min: 4 });
    }
    let third = third_moment_exact(m)?;
    let s = m.std_entries().ok_or(PermError::Degenerate)?;
    let nf = n as f64;

    let mut sum_fourth = 0.0;
    let mut row_sq = vec![0.0; n];
    let mut col_sq = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let x = s[i * n + j];
            let x2 = x * x;
            sum_fourth += x2 * x2;
            row_sq[i] += x2;
            col_sq[j] += x2;
        }
    }
    let triple: f64 = row_sq.iter().map(|r| r * r).sum::<f64>()
        + col_sq.iter().map(|c| c * c).sum::<f64>();

    let mut quad = 0.0;
    for k in 0..n {
        for h in 0..n {
            let mut g = 0.0;
            for i in 0..n {
                g += s[i * n + k] * s[i * n + h];
            }
            quad += g * g;
        }
    }

    let fourth = 3.0 * (nf * nf - 3.0 * nf + 1.0) * (nf - 1.0) / (nf * (nf - 2.0) * (nf - 3.0))
        - 3.0 / ((nf - 2.0) * (nf - 3.0)) * triple
        + nf * (nf + 1.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0)) * sum_fourth
        + 6.0 / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)) * quad;
    Ok((third, fourth))
}

/// Leading terms of the exact moments plus remainder bounds that hold for
/// every matrix: `|third_exact - third| <= third_remainder_bound` and
/// likewise for the fourth.
pub fn moments_simplified(m: &ScoreMatrix) -> Result<MomentsSimplified, PermError> {
    let n = m.n();
    if n < 4 {
        return Err(PermError::TooSmall { n, min: 4 });
    }
    let moms = linrank_matrix::moments(m)?;
    let n2 = (n * n) as f64;
    Ok(MomentsSimplified {
        third: moms.lambda1,
        third_remainder_bound: 11.0 * moms.beta / n2,
        fourth: 3.0 + moms.lambda2,
        fourth_remainder_bound: 336.0 * moms.delta / n2,
    })
}
