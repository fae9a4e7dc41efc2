use crate::MatrixError;

/// An `n x n` score matrix with cached centering and scale statistics.
///
/// For entries `a_ij` the cached quantities are the row means `a_i.`, the
/// column means `a_.j`, the grand mean `a..`, the statistic mean
/// `mu = n * a..` and the statistic variance
///
/// ```text
/// sigma2 = (1/(n-1)) * sum_ij (a_ij - a_i. - a_.j + a..)^2
/// ```
///
/// (defined as 0 for `n = 1`). When `sigma2 > 0` the standardized entries
/// `(a_ij - a_i. - a_.j + a..) / sigma` are cached as well; each of their rows
/// and columns sums to zero and their squares sum to `n - 1`, so the
/// standardized statistic has mean 0 and variance 1 under a uniformly random
/// permutation.
///
/// A `ScoreMatrix` is immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    entries: Vec<f64>,
    row_means: Vec<f64>,
    col_means: Vec<f64>,
    grand_mean: f64,
    mu: f64,
    sigma2: f64,
    std_entries: Option<Vec<f64>>,
}

impl ScoreMatrix {
    /// Builds a matrix from rows, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare {
                    row: i,
                    got: row.len(),
                    expected: n,
                });
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            entries.extend_from_slice(row);
        }
        Self::from_flat(n, entries)
    }

    /// Builds a matrix from a row-major entry buffer of length `n * n`.
    pub fn from_flat(n: usize, entries: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != n * n {
            return Err(MatrixError::WrongLength {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        for (k, a) in entries.iter().enumerate() {
            if !a.is_finite() {
                return Err(MatrixError::NonFinite { i: k / n, j: k % n });
            }
        }
        Ok(Self::from_flat_valid(n, entries))
    }

    /// Entries are assumed square, finite and non-empty.
    pub(crate) fn from_flat_valid(n: usize, entries: Vec<f64>) -> Self {
        let nf = n as f64;
        let mut row_means = vec![0.0; n];
        let mut col_means = vec![0.0; n];
        let mut grand_mean = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = entries[i * n + j];
                row_means[i] += a;
                col_means[j] += a;
                grand_mean += a;
            }
        }
        for m in &mut row_means {
            *m /= nf;
        }
        for m in &mut col_means {
            *m /= nf;
        }
        grand_mean /= nf * nf;
        let mu = nf * grand_mean;

        let sigma2 = if n >= 2 {
            let mut ss = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let c = entries[i * n + j] - row_means[i] - col_means[j] + grand_mean;
                    ss += c * c;
                }
            }
            ss / (nf - 1.0)
        } else {
            0.0
        };

        let std_entries = if sigma2 > 0.0 {
            let sigma = sigma2.sqrt();
            let mut s = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    s.push((entries[i * n + j] - row_means[i] - col_means[j] + grand_mean) / sigma);
                }
            }
            Some(s)
        } else {
            None
        };

        ScoreMatrix {
            n,
            entries,
            row_means,
            col_means,
            grand_mean,
            mu,
            sigma2,
            std_entries,
        }
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major raw entries, length `n * n`.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Raw entry `a_ij` (0-based indices).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row means `a_i.`.
    pub fn row_means(&self) -> &[f64] {
        &self.row_means
    }

    /// Column means `a_.j`.
    pub fn col_means(&self) -> &[f64] {
        &self.col_means
    }

    /// Grand mean `a..`.
    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }

    /// Mean of the statistic: `mu = n * a..`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Variance of the statistic under a uniformly random permutation.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Standardized entries, row-major; `None` when `sigma2 = 0`.
    pub fn std_entries(&self) -> Option<&[f64]> {
        self.std_entries.as_deref()
    }

    /// Standardized entry (0-based indices); `None` when `sigma2 = 0`.
    pub fn std_entry(&self, i: usize, j: usize) -> Option<f64> {
        self.std_entries.as_ref().map(|s| s[i * self.n + j])
    }

    /// Whether `sigma2 = 0`, i.e. the statistic is almost surely constant.
    pub fn is_degenerate(&self) -> bool {
        self.std_entries.is_none()
    }

    /// A fresh matrix whose raw entries are this matrix's standardized ones.
    ///
    /// Standardizing the result again reproduces it (up to rounding): the
    /// standardized entries are already double centered with variance sum
    /// `n - 1`.
    pub fn standardized(&self) -> Result<ScoreMatrix, MatrixError> {
        match &self.std_entries {
            Some(s) => Ok(ScoreMatrix::from_flat_valid(self.n, s.clone())),
            None => Err(MatrixError::Degenerate),
        }
    }
}

/// Builds a [`ScoreMatrix`] from an `n x n` grid of rows.
///
/// ```
/// let m = linrank_matrix::build_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
/// assert_eq!(m.mu(), 1.0);
/// assert_eq!(m.sigma2(), 1.0);
/// assert_eq!(m.std_entries().unwrap(), &[-0.5, 0.5, 0.5, -0.5]);
/// ```
pub fn build_matrix(rows: &[Vec<f64>]) -> Result<ScoreMatrix, MatrixError> {
    ScoreMatrix::from_rows(rows)
}

/// Builds the rank-one matrix `a_ij = e_i * d_j` from regression
/// coefficients `e` and scores `d`.
///
/// Two-sample statistics arise from `e` an indicator vector; simple linear
/// rank statistics from general `e`.
pub fn build_product_matrix(regression: &[f64], scores: &[f64]) -> Result<ScoreMatrix, MatrixError> {
    if regression.len() != scores.len() {
        return Err(MatrixError::LengthMismatch {
            regression: regression.len(),
            scores: scores.len(),
        });
    }
    let n = regression.len();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    let mut entries = Vec::with_capacity(n * n);
    for &e in regression {
        for &d in scores {
            entries.push(e * d);
        }
    }
    ScoreMatrix::from_flat(n, entries)
}

/// Matched sets of cancelled row and column indices (0-based, strictly
/// increasing, equal cardinality `l`).
///
/// Applying a selector to an `n x n` matrix keeps the `(n-l) x (n-l)` block
/// of non-cancelled rows and columns; `l` may be at most `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmatrixSelector {
    cancelled_rows: Vec<usize>,
    cancelled_cols: Vec<usize>,
}

impl SubmatrixSelector {
    /// Validates that both index sets are strictly increasing and equally
    /// sized. Range checks against a concrete `n` happen in [`submatrix`].
    pub fn new(
        cancelled_rows: Vec<usize>,
        cancelled_cols: Vec<usize>,
    ) -> Result<Self, MatrixError> {
        if cancelled_rows.len() != cancelled_cols.len() {
            return Err(MatrixError::SelectorUnbalanced {
                rows: cancelled_rows.len(),
                cols: cancelled_cols.len(),
            });
        }
        let increasing = |s: &[usize]| s.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&cancelled_rows) || !increasing(&cancelled_cols) {
            return Err(MatrixError::SelectorNotIncreasing);
        }
        Ok(SubmatrixSelector {
            cancelled_rows,
            cancelled_cols,
        })
    }

    /// Number of cancelled rows (equal to the number of cancelled columns).
    pub fn level(&self) -> usize {
        self.cancelled_rows.len()
    }

    /// Cancelled row indices.
    pub fn cancelled_rows(&self) -> &[usize] {
        &self.cancelled_rows
    }

    /// Cancelled column indices.
    pub fn cancelled_cols(&self) -> &[usize] {
        &self.cancelled_cols
    }
}

/// Deletes the selected rows and columns and rebuilds all statistics for the
/// remaining `(n-l) x (n-l)` block.
pub fn submatrix(m: &ScoreMatrix, sel: &SubmatrixSelector) -> Result<ScoreMatrix, MatrixError> {
    let n = m.n();
    let l = sel.level();
    if l >= n {
        return Err(MatrixError::SelectorTooLarge { l, n });
    }
    for &idx in sel.cancelled_rows().iter().chain(sel.cancelled_cols()) {
        if idx >= n {
            return Err(MatrixError::SelectorOutOfRange { index: idx, n });
        }
    }
    let keep = |cancelled: &[usize]| -> Vec<usize> {
        let mut out = Vec::with_capacity(n - l);
        let mut c = cancelled.iter().peekable();
        for i in 0..n {
            if c.peek() == Some(&&i) {
                c.next();
            } else {
                out.push(i);
            }
        }
        out
    };
    let rows = keep(sel.cancelled_rows());
    let cols = keep(sel.cancelled_cols());
    let k = n - l;
    let mut entries = Vec::with_capacity(k * k);
    for &i in &rows {
        for &j in &cols {
            entries.push(m.entry(i, j));
        }
    }
    Ok(ScoreMatrix::from_flat_valid(k, entries))
}
