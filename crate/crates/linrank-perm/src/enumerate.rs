use crate::{factorial, PermError, StepCdf};
use linrank_matrix::{build_product_matrix, ScoreMatrix};
use std::collections::HashMap;

/// Largest `n` enumerated without an explicit override.
pub const DEFAULT_CUTOFF: usize = 10;
/// Hard ceiling for enumeration (`11! ~ 4e7` permutations).
pub const MAX_CUTOFF: usize = 11;

/// Permutations per work chunk. Fixed so the chunk layout, and therefore
/// the output, is independent of how many workers process the chunks.
const CHUNK_PERMS: u64 = 40_320;

/// Subset budget for two-sample enumeration.
const MAX_SUBSETS: u128 = 10_000_000;

/// Distribution of `T = sum_i a_{i pi(i)}` over all `n!` permutations,
/// optionally of the standardized statistic `(T - mu) / sigma`.
///
/// Memory scales with the number of distinct statistic values, which can
/// reach `n!` for unstructured matrices.
pub fn exact_distribution(m: &ScoreMatrix, standardized: bool) -> Result<StepCdf, PermError> {
    exact_distribution_with_cutoff(m, standardized, DEFAULT_CUTOFF)
}

/// [`exact_distribution`] with an explicit cutoff up to [`MAX_CUTOFF`].
pub fn exact_distribution_with_cutoff(
    m: &ScoreMatrix,
    standardized: bool,
    cutoff: usize,
) -> Result<StepCdf, PermError> {
    validate(m, standardized, cutoff)?;
    finish(enumeration_counts(m, true), m, standardized)
}

/// Single-threaded [`exact_distribution`]; same output bit for bit.
pub fn exact_distribution_seq(m: &ScoreMatrix, standardized: bool) -> Result<StepCdf, PermError> {
    validate(m, standardized, DEFAULT_CUTOFF)?;
    finish(enumeration_counts(m, false), m, standardized)
}

fn validate(m: &ScoreMatrix, standardized: bool, cutoff: usize) -> Result<(), PermError> {
    if cutoff > MAX_CUTOFF {
        return Err(PermError::CutoffTooLarge {
            cutoff,
            max: MAX_CUTOFF,
        });
    }
    if m.n() > cutoff {
        return Err(PermError::AboveCutoff { n: m.n(), cutoff });
    }
    if standardized && m.is_degenerate() {
        return Err(PermError::Degenerate);
    }
    Ok(())
}

pub(crate) fn finish(
    counts: HashMap<u64, u64>,
    m: &ScoreMatrix,
    standardized: bool,
) -> Result<StepCdf, PermError> {
    let sigma = m.sigma2().sqrt();
    let pairs = counts
        .into_iter()
        .map(|(bits, c)| {
            let v = f64::from_bits(bits);
            let v = if standardized {
                (v - m.mu()) / sigma
            } else {
                v
            };
            (v, c as f64)
        })
        .collect();
    Ok(StepCdf::from_weighted(pairs))
}

fn enumeration_counts(m: &ScoreMatrix, parallel: bool) -> HashMap<u64, u64> {
    let ranges = chunk_ranges(factorial(m.n()), CHUNK_PERMS);
    let maps = run_chunks(&ranges, parallel, |&(start, end)| count_chunk(m, start, end));
    merge_counts(maps)
}

pub(crate) fn chunk_ranges(total: u64, chunk: u64) -> Vec<(u64, u64)> {
    let mut ranges = Vec::new();
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        ranges.push((start, end));
        start = end;
    }
    ranges
}

/// Runs one closure per chunk, in parallel when the feature and the flag
/// both allow it; results always come back in chunk order.
pub(crate) fn run_chunks<C: Sync, R: Send>(
    chunks: &[C],
    parallel: bool,
    work: impl Fn(&C) -> R + Sync + Send,
) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return chunks.par_iter().map(work).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    chunks.iter().map(work).collect()
}

pub(crate) fn merge_counts(maps: Vec<HashMap<u64, u64>>) -> HashMap<u64, u64> {
    let mut total: HashMap<u64, u64> = HashMap::new();
    for map in maps {
        for (k, c) in map {
            *total.entry(k).or_insert(0) += c;
        }
    }
    total
}

fn count_chunk(m: &ScoreMatrix, start: u64, end: u64) -> HashMap<u64, u64> {
    let n = m.n();
    let a = m.entries();
    let mut perm = permutation_at_rank(n, start);
    let mut map = HashMap::new();
    for rank in start..end {
        let mut t = 0.0;
        for (i, &target) in perm.iter().enumerate() {
            t += a[i * n + target];
        }
        *map.entry(t.to_bits()).or_insert(0) += 1;
        if !next_permutation(&mut perm) {
            debug_assert_eq!(rank + 1, end);
        }
    }
    map
}

/// The permutation of `0..n` at lexicographic `rank`, via factorial-base
/// digits.
pub(crate) fn permutation_at_rank(n: usize, mut rank: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for pos in 0..n {
        let f = factorial(n - 1 - pos);
        let digit = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(digit));
    }
    out
}

/// Lexicographic rank of a permutation of `0..n`; inverse of
/// [`permutation_at_rank`].
pub(crate) fn lehmer_rank(perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller_later = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank += smaller_later as u64 * factorial(n - 1 - i);
    }
    rank
}

/// Advances to the lexicographic successor; `false` at the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Distribution of a two-sample statistic `T = sum_{j in S} d_j` over the
/// uniformly random `group`-subset `S` of the score positions.
///
/// This equals `exact_distribution` of the product matrix with regression
/// constants `1` on the first `group` rows and `0` elsewhere, but scales to
/// any `n` with a manageable `C(n, group)`, since the statistic only sees
/// the image of the first block. Subset spaces are small, so this runs on
/// the calling thread.
pub fn two_sample_distribution(
    scores: &[f64],
    group: usize,
    standardized: bool,
) -> Result<StepCdf, PermError> {
    let n = scores.len();
    if n < 2 {
        return Err(PermError::TooSmall { n, min: 2 });
    }
    if group == 0 || group >= n {
        return Err(PermError::BadGroup { group, n });
    }
    let mut regression = vec![0.0; n];
    for r in regression.iter_mut().take(group) {
        *r = 1.0;
    }
    let product = build_product_matrix(&regression, scores)?;
    if standardized && product.is_degenerate() {
        return Err(PermError::Degenerate);
    }
    let combinations = binomial(n, group);
    if combinations > MAX_SUBSETS {
        return Err(PermError::TooManySubsets {
            combinations,
            max: MAX_SUBSETS,
        });
    }

    let mut idx: Vec<usize> = (0..group).collect();
    let mut counts: HashMap<u64, u64> = HashMap::new();
    loop {
        let t: f64 = idx.iter().map(|&j| scores[j]).sum();
        *counts.entry(t.to_bits()).or_insert(0) += 1;
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    finish(counts, &product, standardized)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
