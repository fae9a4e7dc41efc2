use crate::{MatrixError, ScoreMatrix};

/// Result of truncating the standardized entries of a matrix at 1/2.
///
/// Writing `s` for the standardized entries of the source matrix, the
/// truncated matrix `A'` keeps `s_ij` when `|s_ij| <= 1/2` and replaces it by
/// zero otherwise. The positions that were zeroed form `gamma_set`. The
/// centering field `d_ij = a'_i. + a'_.j - a'..` is what standardizing `A'`
/// subtracts from each entry, so the re-standardized entries satisfy
/// `abar_ij = (a'_ij - d_ij) / sigma_{A'}` whenever `sigma_{A'} > 0`.
///
/// The bracket sums `A[k] = 2^k * sum_ij |s_ij|^k` bound all the truncation
/// bookkeeping: the number of zeroed entries never exceeds `A[k]`, the mean
/// of `A'` is at most `A[k] / (2n)` in absolute value, and for `k >= 2` the
/// variance of `A'` is within `8 A[k] / n` of one.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTriple {
    a_prime: ScoreMatrix,
    gamma_set: Vec<(usize, usize)>,
    d_entries: Vec<f64>,
    abar: Option<Vec<f64>>,
    a_bracket: [f64; 8],
}

impl TruncatedTriple {
    /// The truncated matrix `A'` with its own cached statistics.
    pub fn a_prime(&self) -> &ScoreMatrix {
        &self.a_prime
    }

    /// Positions `(i, j)` whose standardized entry exceeded 1/2 in absolute
    /// value (0-based, row-major order).
    pub fn gamma_set(&self) -> &[(usize, usize)] {
        &self.gamma_set
    }

    /// Row-major centering field `d_ij = a'_i. + a'_.j - a'..`.
    pub fn d_entries(&self) -> &[f64] {
        &self.d_entries
    }

    /// Standardized entries of `A'`; `None` when `sigma_{A'} = 0`.
    pub fn abar(&self) -> Option<&[f64]> {
        self.abar.as_deref()
    }

    /// Bracket sum `A[k] = 2^k * sum_ij |s_ij|^k` over the source's
    /// standardized entries.
    ///
    /// # Panics
    ///
    /// Panics if `k` is outside `1..=8`.
    pub fn a_bracket(&self, k: usize) -> f64 {
        assert!((1..=8).contains(&k), "bracket sums are kept for k in 1..=8");
        self.a_bracket[k - 1]
    }
}

/// Truncates the standardized entries of `m` at 1/2 and collects the
/// truncation bookkeeping.
///
/// Entries exactly equal to 1/2 in absolute value are kept.
pub fn truncate(m: &ScoreMatrix) -> Result<TruncatedTriple, MatrixError> {
    let s = m.std_entries().ok_or(MatrixError::Degenerate)?;
    let n = m.n();

    let mut kept = Vec::with_capacity(n * n);
    let mut gamma_set = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = s[i * n + j];
            if x.abs() <= 0.5 {
                kept.push(x);
            } else {
                kept.push(0.0);
                gamma_set.push((i, j));
            }
        }
    }
    let a_prime = ScoreMatrix::from_flat_valid(n, kept);

    let mut d_entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            d_entries
                .push(a_prime.row_means()[i] + a_prime.col_means()[j] - a_prime.grand_mean());
        }
    }
    // (a'_ij - d_ij) / sigma_{A'} is exactly the standardization of A'
    let abar = a_prime.std_entries().map(|x| x.to_vec());

    let mut a_bracket = [0.0; 8];
    for (idx, slot) in a_bracket.iter_mut().enumerate() {
        let k = (idx + 1) as i32;
        let sum: f64 = s.iter().map(|x| x.abs().powi(k)).sum();
        *slot = 2.0f64.powi(k) * sum;
    }

    Ok(TruncatedTriple {
        a_prime,
        gamma_set,
        d_entries,
        abar,
        a_bracket,
    })
}
