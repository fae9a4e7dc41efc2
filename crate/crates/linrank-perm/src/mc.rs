use crate::enumerate::{chunk_ranges, finish, merge_counts, run_chunks};
use crate::{PermError, StepCdf};
use linrank_matrix::ScoreMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Draws per stream. Chunk `c` always uses stream `c` of the seeded
/// generator, so the sampled multiset is a function of `(draws, seed)`
/// alone, not of thread count.
const CHUNK_DRAWS: u64 = 8192;

/// Empirical distribution of `T` over `draws` uniform random permutations.
pub fn mc_distribution(m: &ScoreMatrix, draws: u64, seed: u64) -> Result<StepCdf, PermError> {
    sample_distribution(m, draws, seed, false, true)
}

/// Single-threaded [`mc_distribution`]; same output bit for bit.
pub fn mc_distribution_seq(m: &ScoreMatrix, draws: u64, seed: u64) -> Result<StepCdf, PermError> {
    sample_distribution(m, draws, seed, false, false)
}

/// [`mc_distribution`] of the standardized statistic `(T - mu) / sigma`.
pub fn mc_distribution_standardized(
    m: &ScoreMatrix,
    draws: u64,
    seed: u64,
) -> Result<StepCdf, PermError> {
    sample_distribution(m, draws, seed, true, true)
}

/// Single-threaded [`mc_distribution_standardized`]; same output bit for bit.
pub fn mc_distribution_standardized_seq(
    m: &ScoreMatrix,
    draws: u64,
    seed: u64,
) -> Result<StepCdf, PermError> {
    sample_distribution(m, draws, seed, true, false)
}

fn sample_distribution(
    m: &ScoreMatrix,
    draws: u64,
    seed: u64,
    standardized: bool,
    parallel: bool,
) -> Result<StepCdf, PermError> {
    if draws == 0 {
        return Err(PermError::NoDraws);
    }
    if standardized && m.is_degenerate() {
        return Err(PermError::Degenerate);
    }
    let ranges = chunk_ranges(draws, CHUNK_DRAWS);
    let maps = run_chunks(&ranges, parallel, |&(start, end)| {
        sample_chunk(m, seed, start / CHUNK_DRAWS, end - start)
    });
    finish(merge_counts(maps), m, standardized)
}

fn sample_chunk(m: &ScoreMatrix, seed: u64, stream: u64, count: u64) -> HashMap<u64, u64> {
    let n = m.n();
    let a = m.entries();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut map = HashMap::new();
    for _ in 0..count {
        shuffle_in_place(&mut rng, &mut perm);
        let mut t = 0.0;
        for (i, &target) in perm.iter().enumerate() {
            t += a[i * n + target];
        }
        *map.entry(t.to_bits()).or_insert(0) += 1;
    }
    map
}

/// Fisher-Yates over whatever `perm` currently holds; uniform because each
/// swap index is uniform on the remaining prefix.
pub(crate) fn shuffle_in_place(rng: &mut ChaCha8Rng, perm: &mut [usize]) {
    for i in (1..perm.len()).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use linrank_matrix::build_matrix;

    fn swap_matrix() -> ScoreMatrix {
        build_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn single_draw_is_one_atom() {
        let cdf = mc_distribution(&swap_matrix(), 1, 5).unwrap();
        assert_eq!(cdf.atoms().len(), 1);
        assert_eq!(cdf.atoms()[0].1, 1.0);
    }

    #[test]
    fn same_seed_reproduces_bit_for_bit() {
        let m = build_matrix(&[
            vec![0.3, -1.2, 0.7],
            vec![1.1, 0.4, -0.6],
            vec![-0.8, 2.2, 0.5],
        ])
        .unwrap();
        let first = mc_distribution(&m, 20_000, 99).unwrap();
        let second = mc_distribution(&m, 20_000, 99).unwrap();
        assert_eq!(first.atoms(), second.atoms());
        let third = mc_distribution(&m, 20_000, 100).unwrap();
        assert_ne!(first.atoms(), third.atoms());
    }

    #[test]
    fn frequencies_match_the_two_point_law() {
        let draws = 100_000u64;
        let cdf = mc_distribution(&swap_matrix(), draws, 42).unwrap();
        // Binomial(1e5, 1/2): SE of the frequency is ~1.58e-3.
        let se = 0.5 / (draws as f64).sqrt();
        assert_abs_diff_eq!(cdf.mass_at(0.0), 0.5, epsilon = 3.0 * se);
        assert_abs_diff_eq!(cdf.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standardized_variant_shifts_and_scales() {
        let raw = mc_distribution(&swap_matrix(), 4096, 7).unwrap();
        let std = mc_distribution_standardized(&swap_matrix(), 4096, 7).unwrap();
        assert_eq!(raw.mass_at(0.0), std.mass_at(-1.0));
        assert_eq!(raw.mass_at(2.0), std.mass_at(1.0));
    }

    #[test]
    fn guards() {
        assert_eq!(
            mc_distribution(&swap_matrix(), 0, 1),
            Err(PermError::NoDraws)
        );
        let flat = build_matrix(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            mc_distribution_standardized(&flat, 10, 1),
            Err(PermError::Degenerate)
        );
        assert!(mc_distribution(&flat, 10, 1).is_ok());
    }
}
