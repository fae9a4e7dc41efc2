//! Five coupled random permutations built from a 16-slot index vector.
//!
//! The chain starts from a uniform permutation and applies four exchange
//! maps, each touching a doubling prefix of the index vector, so that the
//! final permutation is again uniform while successive statistics differ
//! by localized increments. The increments drive the moment identities
//! checked in [`CouplingLaw`].

use crate::enumerate::{chunk_ranges, lehmer_rank, next_permutation, run_chunks};
use crate::mc::shuffle_in_place;
use crate::{factorial, PermError};
use linrank_matrix::ScoreMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

const CHUNK_DRAWS: u64 = 8192;

/// Rank tallies keep a `n!`-sized table per chunk, so batch sampling stops
/// well below the enumeration cutoff.
const BATCH_CUTOFF: usize = 8;

/// Construction stages: each target block copies the equality pattern of
/// its template block onto fresh values.
const STAGES: [(&[usize], &[usize]); 3] = [
    (&[0, 1], &[2, 3]),
    (&[2, 3, 0, 1], &[4, 5, 6, 7]),
    (&[4, 5, 6, 7, 0, 1, 2, 3], &[8, 9, 10, 11, 12, 13, 14, 15]),
];

/// Exchange maps as (argument slot, image slot) pairs: the map sends the
/// value in the first slot to the value in the second. The prefix is the
/// slot range whose values the map may move; everything outside stays
/// fixed, and unspecified values inside are completed canonically.
const V_MAP: [(usize, usize); 8] = [
    (0, 12),
    (1, 13),
    (2, 14),
    (3, 15),
    (4, 8),
    (5, 9),
    (6, 10),
    (7, 11),
];
const U_MAP: [(usize, usize); 4] = [(0, 6), (1, 7), (2, 4), (3, 5)];
const T_MAP: [(usize, usize); 2] = [(0, 3), (1, 2)];
const S_MAP: [(usize, usize); 2] = [(0, 1), (1, 0)];
const V_PREFIX: usize = 16;
const U_PREFIX: usize = 8;
const T_PREFIX: usize = 4;
const S_PREFIX: usize = 2;

/// One realization of the coupled permutation chain. All indices 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingDraw {
    /// The 16-slot index vector; always satisfies the pattern equivalences.
    pub i_vec: [usize; 16],
    /// Images under the first permutation: `j_vec[k] = perms[0][i_vec[8+k]]`
    /// for `k < 8` and `j_vec[8+k] = perms[0][i_vec[k]]`.
    pub j_vec: [usize; 16],
    /// The five coupled permutations; `perms[0]` is uniform, and each later
    /// one composes the previous with an exchange map on the right.
    pub perms: [Vec<usize>; 5],
    /// Statistic of the matrix under each permutation.
    pub stats: [f64; 5],
    /// `deltas[k] = stats[k+1] - stats[k]`.
    pub deltas: [f64; 4],
    /// Distinct values among the first 2 slots.
    pub gamma: usize,
    /// Distinct values among the first 4 slots.
    pub theta: usize,
    /// Distinct values among the first 8 slots.
    pub mu: usize,
    /// Distinct values among all 16 slots.
    pub rho: usize,
}

impl CouplingDraw {
    fn empty(n: usize) -> Self {
        CouplingDraw {
            i_vec: [0; 16],
            j_vec: [0; 16],
            perms: std::array::from_fn(|_| vec![0; n]),
            stats: [0.0; 5],
            deltas: [0.0; 4],
            gamma: 0,
            theta: 0,
            mu: 0,
            rho: 0,
        }
    }
}

/// Whether an index vector satisfies the equality-pattern equivalences
/// that make the exchange maps well defined: the slot pairs of each target
/// block repeat exactly the equalities of its template block.
pub fn pattern_is_valid(i_vec: &[usize; 16]) -> bool {
    STAGES.iter().all(|&(template, target)| {
        let len = template.len();
        (0..len).all(|p| {
            (p + 1..len).all(|q| {
                (i_vec[template[p]] == i_vec[template[q]])
                    == (i_vec[target[p]] == i_vec[target[q]])
            })
        })
    })
}

fn distinct_count(values: &[usize]) -> usize {
    let mut buf = [0usize; 16];
    buf[..values.len()].copy_from_slice(values);
    let buf = &mut buf[..values.len()];
    buf.sort_unstable();
    1 + buf.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Builds one exchange map from its slot-pair table. Values outside the
/// touched prefix stay fixed; touched values without a specified image are
/// matched ascending-to-ascending, which is one admissible completion and
/// never feeds the statistic increments.
fn table_perm(n: usize, i_vec: &[usize; 16], map: &[(usize, usize)], prefix: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut touched: Vec<usize> = i_vec[..prefix].to_vec();
    touched.sort_unstable();
    touched.dedup();

    let mut args: Vec<usize> = Vec::with_capacity(map.len());
    let mut images: Vec<usize> = Vec::with_capacity(map.len());
    for &(arg_slot, image_slot) in map {
        let arg = i_vec[arg_slot];
        let image = i_vec[image_slot];
        if let Some(pos) = args.iter().position(|&a| a == arg) {
            debug_assert_eq!(
                images[pos], image,
                "pattern equivalences keep duplicate arguments consistent"
            );
        } else {
            args.push(arg);
            images.push(image);
        }
    }

    let leftover_args: Vec<usize> = touched
        .iter()
        .copied()
        .filter(|a| !args.contains(a))
        .collect();
    let leftover_images: Vec<usize> = touched
        .iter()
        .copied()
        .filter(|m| !images.contains(m))
        .collect();
    debug_assert_eq!(leftover_args.len(), leftover_images.len());

    for (&arg, &image) in args.iter().zip(&images) {
        perm[arg] = image;
    }
    for (&arg, &image) in leftover_args.iter().zip(&leftover_images) {
        perm[arg] = image;
    }
    debug_assert!(is_bijection(&perm));
    perm
}

fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| {
        x < seen.len() && !std::mem::replace(&mut seen[x], true)
    })
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

/// Right-composition chains: chain `k` maps `x` through the first `k+1`
/// exchange maps, so the `(k+2)`-th permutation is `perm1 ∘ chain_k`.
fn build_chains(n: usize, i_vec: &[usize; 16]) -> [Vec<usize>; 4] {
    let v = table_perm(n, i_vec, &V_MAP, V_PREFIX);
    let u = table_perm(n, i_vec, &U_MAP, U_PREFIX);
    let t = table_perm(n, i_vec, &T_MAP, T_PREFIX);
    let s = table_perm(n, i_vec, &S_MAP, S_PREFIX);
    let vu = compose(&v, &u);
    let vut = compose(&vu, &t);
    let vuts = compose(&vut, &s);
    [v, vu, vut, vuts]
}

fn fill_from_chains(
    m: &ScoreMatrix,
    i_vec: &[usize; 16],
    perm1: &[usize],
    chains: &[Vec<usize>; 4],
    out: &mut CouplingDraw,
) {
    let n = m.n();
    let a = m.entries();
    out.i_vec = *i_vec;

    out.perms[0].clear();
    out.perms[0].extend_from_slice(perm1);
    for (chain, dest) in chains.iter().zip(&mut out.perms[1..]) {
        dest.clear();
        dest.extend((0..n).map(|x| perm1[chain[x]]));
    }

    for k in 0..5 {
        let mut t = 0.0;
        for (x, &image) in out.perms[k].iter().enumerate() {
            t += a[x * n + image];
        }
        out.stats[k] = t;
    }
    for k in 0..4 {
        out.deltas[k] = out.stats[k + 1] - out.stats[k];
    }

    for k in 0..8 {
        out.j_vec[k] = perm1[i_vec[8 + k]];
        out.j_vec[8 + k] = perm1[i_vec[k]];
    }

    out.gamma = distinct_count(&i_vec[..2]);
    out.theta = distinct_count(&i_vec[..4]);
    out.mu = distinct_count(&i_vec[..8]);
    out.rho = distinct_count(&i_vec[..16]);
    debug_assert!(pattern_is_valid(i_vec));
}

/// Copies the equality pattern of the template slots onto the target
/// slots: each distinct template value becomes a fresh value, the fresh
/// values drawn uniformly without replacement from the full range. The
/// resulting stage-conditional law is uniform over the compatible set.
fn copy_stage(rng: &mut ChaCha8Rng, n: usize, i_vec: &mut [usize; 16], stage: usize) {
    let (template, target) = STAGES[stage];
    let mut class_values: Vec<usize> = Vec::with_capacity(template.len());
    let mut class_of = [0usize; 8];
    for (p, &slot) in template.iter().enumerate() {
        let val = i_vec[slot];
        match class_values.iter().position(|&v| v == val) {
            Some(c) => class_of[p] = c,
            None => {
                class_of[p] = class_values.len();
                class_values.push(val);
            }
        }
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut fresh: Vec<usize> = Vec::with_capacity(class_values.len());
    for _ in 0..class_values.len() {
        let pick = rng.gen_range(0..pool.len());
        fresh.push(pool.swap_remove(pick));
    }
    for (p, &slot) in target.iter().enumerate() {
        i_vec[slot] = fresh[class_of[p]];
    }
}

fn sample_index_vector(rng: &mut ChaCha8Rng, n: usize) -> [usize; 16] {
    let mut i_vec = [0usize; 16];
    i_vec[0] = rng.gen_range(0..n);
    i_vec[1] = rng.gen_range(0..n);
    for stage in 0..STAGES.len() {
        copy_stage(rng, n, &mut i_vec, stage);
    }
    i_vec
}

/// Reusable sampler for coupled draws.
pub struct CouplingSampler {
    rng: ChaCha8Rng,
    perm1: Vec<usize>,
}

impl CouplingSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        CouplingSampler {
            rng,
            perm1: Vec::new(),
        }
    }

    /// Draws into a caller-provided scratch value, avoiding allocation.
    pub fn draw_into(&mut self, m: &ScoreMatrix, out: &mut CouplingDraw) -> Result<(), PermError> {
        let n = m.n();
        if n < 2 {
            return Err(PermError::TooSmall { n, min: 2 });
        }
        let i_vec = sample_index_vector(&mut self.rng, n);
        self.perm1.clear();
        self.perm1.extend(0..n);
        shuffle_in_place(&mut self.rng, &mut self.perm1);
        let chains = build_chains(n, &i_vec);
        fill_from_chains(m, &i_vec, &self.perm1, &chains, out);
        Ok(())
    }

    pub fn draw(&mut self, m: &ScoreMatrix) -> Result<CouplingDraw, PermError> {
        let mut out = CouplingDraw::empty(m.n());
        self.draw_into(m, &mut out)?;
        Ok(out)
    }
}

/// One coupled draw from a fresh sampler.
pub fn sample_coupling(m: &ScoreMatrix, seed: u64) -> Result<CouplingDraw, PermError> {
    CouplingSampler::new(seed).draw(m)
}

/// Tallies from repeated coupled draws.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBatch {
    pub draws: u64,
    pub n: usize,
    /// Final-permutation counts indexed by lexicographic rank.
    pub perm5_counts: Vec<u64>,
    /// Counts of `(I_1, J_1)` pairs, row-major `n x n`.
    pub pair_counts: Vec<u64>,
    /// Running sum of `a[I_1][J_1] * delta4`, entries as given.
    pub product_sum: f64,
    /// Running sum of its square.
    pub product_sq_sum: f64,
}

impl CouplingBatch {
    pub fn product_mean(&self) -> f64 {
        self.product_sum / self.draws as f64
    }

    /// Standard error of [`product_mean`](Self::product_mean).
    pub fn product_se(&self) -> f64 {
        let d = self.draws as f64;
        let mean = self.product_mean();
        let var = (self.product_sq_sum - d * mean * mean) / (d - 1.0);
        (var.max(0.0) / d).sqrt()
    }
}

/// Samples `draws` couplings and tallies the quantities needed by the
/// distribution checks: final-permutation ranks, `(I_1, J_1)` pairs, and
/// the entry-increment product. Deterministic in `(draws, seed)`.
pub fn coupling_mc_batch(m: &ScoreMatrix, draws: u64, seed: u64) -> Result<CouplingBatch, PermError> {
    batch_impl(m, draws, seed, true)
}

/// Single-threaded [`coupling_mc_batch`]; same output bit for bit.
pub fn coupling_mc_batch_seq(
    m: &ScoreMatrix,
    draws: u64,
    seed: u64,
) -> Result<CouplingBatch, PermError> {
    batch_impl(m, draws, seed, false)
}

struct BatchChunk {
    perm5_counts: Vec<u64>,
    pair_counts: Vec<u64>,
    product_sum: f64,
    product_sq_sum: f64,
}

fn batch_impl(
    m: &ScoreMatrix,
    draws: u64,
    seed: u64,
    parallel: bool,
) -> Result<CouplingBatch, PermError> {
    let n = m.n();
    if n < 2 {
        return Err(PermError::TooSmall { n, min: 2 });
    }
    if n > BATCH_CUTOFF {
        return Err(PermError::AboveCutoff {
            n,
            cutoff: BATCH_CUTOFF,
        });
    }
    if draws == 0 {
        return Err(PermError::NoDraws);
    }
    let ranges = chunk_ranges(draws, CHUNK_DRAWS);
    let chunks = run_chunks(&ranges, parallel, |&(start, end)| {
        batch_chunk(m, seed, start / CHUNK_DRAWS, end - start)
    });

    let mut batch = CouplingBatch {
        draws,
        n,
        perm5_counts: vec![0; factorial(n) as usize],
        pair_counts: vec![0; n * n],
        product_sum: 0.0,
        product_sq_sum: 0.0,
    };
    for chunk in chunks {
        for (dst, src) in batch.perm5_counts.iter_mut().zip(&chunk.perm5_counts) {
            *dst += src;
        }
        for (dst, src) in batch.pair_counts.iter_mut().zip(&chunk.pair_counts) {
            *dst += src;
        }
        batch.product_sum += chunk.product_sum;
        batch.product_sq_sum += chunk.product_sq_sum;
    }
    Ok(batch)
}

fn batch_chunk(m: &ScoreMatrix, seed: u64, stream: u64, count: u64) -> BatchChunk {
    let n = m.n();
    let a = m.entries();
    let mut sampler = CouplingSampler::with_stream(seed, stream);
    let mut draw = CouplingDraw::empty(n);
    let mut chunk = BatchChunk {
        perm5_counts: vec![0; factorial(n) as usize],
        pair_counts: vec![0; n * n],
        product_sum: 0.0,
        product_sq_sum: 0.0,
    };
    for _ in 0..count {
        sampler
            .draw_into(m, &mut draw)
            .expect("size was validated before chunking");
        chunk.perm5_counts[lehmer_rank(&draw.perms[4]) as usize] += 1;
        let cell = draw.i_vec[0] * n + draw.j_vec[0];
        chunk.pair_counts[cell] += 1;
        let product = a[cell] * draw.deltas[3];
        chunk.product_sum += product;
        chunk.product_sq_sum += product * product;
    }
    chunk
}

/// Visits every `(i_vec, perm1)` state once, with its integer weight
/// `(n - gamma)! (n - theta)! (n - mu)!`; the state probability is the
/// weight over the returned denominator `n^2 (n!)^4`. The scratch draw
/// passed to the visitor is reused between calls.
pub fn for_each_coupling_state(
    m: &ScoreMatrix,
    mut visit: impl FnMut(&CouplingDraw, u64),
) -> Result<u64, PermError> {
    let n = m.n();
    if n < 2 {
        return Err(PermError::TooSmall { n, min: 2 });
    }
    if n > 4 {
        return Err(PermError::LawTooLarge { n, max: 4 });
    }

    let mut perms1: Vec<Vec<usize>> = Vec::with_capacity(factorial(n) as usize);
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        perms1.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }

    let mut i_vec = [0usize; 16];
    let mut scratch = CouplingDraw::empty(n);
    let mut emit = |i_vec: &mut [usize; 16]| {
        let gamma = distinct_count(&i_vec[..2]);
        let theta = distinct_count(&i_vec[..4]);
        let mu = distinct_count(&i_vec[..8]);
        let weight = factorial(n - gamma) * factorial(n - theta) * factorial(n - mu);
        let chains = build_chains(n, i_vec);
        for perm1 in &perms1 {
            fill_from_chains(m, i_vec, perm1, &chains, &mut scratch);
            visit(&scratch, weight);
        }
    };
    for first in 0..n {
        for second in 0..n {
            i_vec[0] = first;
            i_vec[1] = second;
            enumerate_patterns(&mut i_vec, 0, n, &mut emit);
        }
    }

    let nfact = factorial(n);
    Ok(n as u64 * n as u64 * nfact * nfact * nfact * nfact)
}

/// Recursively assigns each stage's classes to every ordered selection of
/// distinct values, reproducing exactly the supports the sampler can reach.
fn enumerate_patterns(
    i_vec: &mut [usize; 16],
    stage: usize,
    n: usize,
    emit: &mut impl FnMut(&mut [usize; 16]),
) {
    if stage == STAGES.len() {
        emit(i_vec);
        return;
    }
    let (template, _) = STAGES[stage];
    let mut class_values: Vec<usize> = Vec::with_capacity(template.len());
    let mut class_of = [0usize; 8];
    for (p, &slot) in template.iter().enumerate() {
        let val = i_vec[slot];
        match class_values.iter().position(|&v| v == val) {
            Some(c) => class_of[p] = c,
            None => {
                class_of[p] = class_values.len();
                class_values.push(val);
            }
        }
    }
    let classes = class_values.len();
    let mut chosen = [usize::MAX; 8];
    let mut used = vec![false; n];
    assign_classes(
        i_vec, stage, n, &class_of, classes, 0, &mut chosen, &mut used, emit,
    );
}

#[allow(clippy::too_many_arguments)]
fn assign_classes(
    i_vec: &mut [usize; 16],
    stage: usize,
    n: usize,
    class_of: &[usize; 8],
    classes: usize,
    next: usize,
    chosen: &mut [usize; 8],
    used: &mut [bool],
    emit: &mut impl FnMut(&mut [usize; 16]),
) {
    if next == classes {
        let (template, target) = STAGES[stage];
        for p in 0..template.len() {
            i_vec[target[p]] = chosen[class_of[p]];
        }
        enumerate_patterns(i_vec, stage + 1, n, emit);
        return;
    }
    for v in 0..n {
        if !used[v] {
            used[v] = true;
            chosen[next] = v;
            assign_classes(i_vec, stage, n, class_of, classes, next + 1, chosen, used, emit);
            used[v] = false;
        }
    }
}

/// Exact joint law of the coupling, with the marginals and expectations
/// needed to validate it. The moment identities hold when the matrix is
/// standardized.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingLaw {
    pub n: usize,
    /// Common denominator `n^2 (n!)^4` of all state probabilities.
    pub denominator: u64,
    /// Total probability mass; exactly 1 up to the final division.
    pub total: f64,
    /// Marginal law of each of the five permutations, by lexicographic
    /// rank. Every row should be uniform.
    pub perm_marginals: [Vec<f64>; 5],
    /// Joint law of `(I_1, J_1)`, row-major; should be uniform on `n x n`.
    pub pair_probs: Vec<f64>,
    /// `E(a[I_1][J_1])`.
    pub mean_entry: f64,
    /// `n E(a[I_1][J_1] delta4)`; equals 1 for standardized matrices.
    pub variance_identity: f64,
    /// `n {E(a delta4 delta3) + E(a delta4^2)/2}`; equals half the exact
    /// third moment.
    pub third_bracket: f64,
    /// `n {E(a d4 d3 d2) + E(a d4 d3^2)/2 + E(a d4^2 d3)/2 + E(a d4^3)/6}`;
    /// equals one sixth of (fourth moment - 3).
    pub fourth_bracket: f64,
    /// Total-variation distance between the joint law of `(T_4, a[I_1][J_1])`
    /// and the product of its marginals; zero by independence.
    pub pair_factorization_tv: f64,
}

/// Compensated accumulator; keeps the summation error of the long
/// weighted expectation sums near one ulp of the total.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Enumerates the full coupling law; `n <= 4`.
pub fn coupling_exact_law(m: &ScoreMatrix) -> Result<CouplingLaw, PermError> {
    let n = m.n();
    if n < 2 {
        return Err(PermError::TooSmall { n, min: 2 });
    }
    if n > 4 {
        return Err(PermError::LawTooLarge { n, max: 4 });
    }
    let a = m.entries();
    let nfact = factorial(n) as usize;

    let mut total: u128 = 0;
    let mut perm_counts: [Vec<u128>; 5] = std::array::from_fn(|_| vec![0u128; nfact]);
    let mut pair_counts: Vec<u128> = vec![0; n * n];
    let mut sum_a = Kahan::default();
    let mut sum_variance = Kahan::default();
    let mut sum_third = Kahan::default();
    let mut sum_fourth = Kahan::default();
    let mut joint: HashMap<(u64, u64), u128> = HashMap::new();
    let mut t4_marginal: HashMap<u64, u128> = HashMap::new();
    let mut entry_marginal: HashMap<u64, u128> = HashMap::new();

    let denominator = for_each_coupling_state(m, |draw, weight| {
        let w = weight as u128;
        let wf = weight as f64;
        total += w;
        for k in 0..5 {
            perm_counts[k][lehmer_rank(&draw.perms[k]) as usize] += w;
        }
        let cell = draw.i_vec[0] * n + draw.j_vec[0];
        pair_counts[cell] += w;

        let entry = a[cell];
        let d4 = draw.deltas[3];
        let d3 = draw.deltas[2];
        let d2 = draw.deltas[1];
        sum_a.add(wf * entry);
        sum_variance.add(wf * entry * d4);
        sum_third.add(wf * (entry * d4 * d3 + entry * d4 * d4 / 2.0));
        sum_fourth.add(wf * (entry * d4 * d3 * d2
            + entry * d4 * d3 * d3 / 2.0
            + entry * d4 * d4 * d3 / 2.0
            + entry * d4 * d4 * d4 / 6.0));

        let t4_bits = draw.stats[3].to_bits();
        let entry_bits = entry.to_bits();
        *joint.entry((t4_bits, entry_bits)).or_insert(0) += w;
        *t4_marginal.entry(t4_bits).or_insert(0) += w;
        *entry_marginal.entry(entry_bits).or_insert(0) += w;
    })?;

    debug_assert_eq!(total, denominator as u128);
    let den = denominator as f64;
    let nf = n as f64;

    let mut tv = 0.0;
    for (&t4_bits, &wt) in &t4_marginal {
        for (&entry_bits, &wa) in &entry_marginal {
            let joint_p = joint.get(&(t4_bits, entry_bits)).copied().unwrap_or(0) as f64 / den;
            let product_p = (wt as f64 / den) * (wa as f64 / den);
            tv += (joint_p - product_p).abs();
        }
    }

    Ok(CouplingLaw {
        n,
        denominator,
        total: total as f64 / den,
        perm_marginals: perm_counts.map(|counts| {
            counts.into_iter().map(|c| c as f64 / den).collect()
        }),
        pair_probs: pair_counts.into_iter().map(|c| c as f64 / den).collect(),
        mean_entry: sum_a.sum / den,
        variance_identity: nf * sum_variance.sum / den,
        third_bracket: nf * sum_third.sum / den,
        fourth_bracket: nf * sum_fourth.sum / den,
        pair_factorization_tv: 0.5 * tv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use linrank_matrix::build_matrix;

    fn sample_matrix(n: usize) -> ScoreMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ((i * n + j) as f64 * 1.618034 + 0.25).sin() * 3.0)
                    .collect()
            })
            .collect();
        build_matrix(&rows).unwrap()
    }

    /// Sum of `a[x][to[x]] - a[x][from[x]]` over the distinct values in
    /// `slots`; the increment of the statistic between two permutations
    /// that agree outside those values.
    fn set_increment(m: &ScoreMatrix, slots: &[usize], to: &[usize], from: &[usize]) -> f64 {
        let n = m.n();
        let a = m.entries();
        let mut values: Vec<usize> = slots.to_vec();
        values.sort_unstable();
        values.dedup();
        values
            .iter()
            .map(|&x| a[x * n + to[x]] - a[x * n + from[x]])
            .sum()
    }

    #[test]
    fn draws_satisfy_the_construction_contracts() {
        let m = sample_matrix(5);
        let n = m.n();
        let mut sampler = CouplingSampler::new(31);
        for _ in 0..400 {
            let d = sampler.draw(&m).unwrap();
            assert!(pattern_is_valid(&d.i_vec));
            assert!(d.i_vec.iter().all(|&x| x < n));
            for perm in &d.perms {
                assert!(is_bijection(perm));
            }
            for k in 0..8 {
                assert_eq!(d.j_vec[k], d.perms[0][d.i_vec[8 + k]]);
                assert_eq!(d.j_vec[8 + k], d.perms[0][d.i_vec[k]]);
            }

            // The final increment only sees the leading 2x2 block.
            let a = m.entries();
            let four_term = a[d.i_vec[0] * n + d.j_vec[0]] + a[d.i_vec[1] * n + d.j_vec[1]]
                - a[d.i_vec[0] * n + d.j_vec[1]]
                - a[d.i_vec[1] * n + d.j_vec[0]];
            assert_abs_diff_eq!(d.deltas[3], four_term, epsilon = 1e-12);

            let i_of = |slots: std::ops::Range<usize>| -> Vec<usize> {
                slots.map(|k| d.i_vec[k]).collect()
            };
            assert_abs_diff_eq!(
                d.deltas[2],
                set_increment(&m, &i_of(0..4), &d.perms[3], &d.perms[2]),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                d.deltas[1],
                set_increment(&m, &i_of(0..8), &d.perms[2], &d.perms[1]),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                d.deltas[0],
                set_increment(&m, &i_of(0..16), &d.perms[1], &d.perms[0]),
                epsilon = 1e-12
            );

            // Images of the leading indices under the successive
            // permutations, as fixed by the exchange-table structure.
            for k in 0..4 {
                assert_eq!(d.perms[1][d.i_vec[k]], d.j_vec[4 + k]);
                assert_eq!(d.perms[1][d.i_vec[4 + k]], d.j_vec[k]);
            }
            for (k, &image) in [2, 3, 0, 1].iter().enumerate() {
                assert_eq!(d.perms[2][d.i_vec[k]], d.j_vec[image]);
            }
            assert_eq!(d.perms[3][d.i_vec[0]], d.j_vec[1]);
            assert_eq!(d.perms[3][d.i_vec[1]], d.j_vec[0]);
            assert_eq!(d.perms[4][d.i_vec[0]], d.j_vec[0]);
            assert_eq!(d.perms[4][d.i_vec[1]], d.j_vec[1]);

            // Exchange maps move nothing outside their touched values.
            let untouched: Vec<usize> = (0..n)
                .filter(|x| !d.i_vec.contains(x))
                .collect();
            for &x in &untouched {
                assert_eq!(d.perms[1][x], d.perms[0][x]);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = sample_matrix(4);
        let first = sample_coupling(&m, 12).unwrap();
        let second = sample_coupling(&m, 12).unwrap();
        assert_eq!(first, second);
        let third = sample_coupling(&m, 13).unwrap();
        assert_ne!(first, third);
    }

    #[test]
    fn final_increment_of_the_two_point_matrix() {
        let m = build_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .standardized()
            .unwrap();
        let mut found = false;
        for_each_coupling_state(&m, |d, _| {
            if d.i_vec[0] == 0 && d.i_vec[1] == 1 && d.j_vec[0] == 0 && d.j_vec[1] == 1 {
                assert_eq!(d.deltas[3], -2.0);
                found = true;
            }
        })
        .unwrap();
        assert!(found);
    }

    #[test]
    fn state_weights_total_the_denominator() {
        for n in [2usize, 3] {
            let m = sample_matrix(n);
            let mut total: u128 = 0;
            let mut per_pattern: HashMap<[usize; 16], (u64, u64)> = HashMap::new();
            let den = for_each_coupling_state(&m, |d, w| {
                total += w as u128;
                let slot = per_pattern.entry(d.i_vec).or_insert((0, 0));
                slot.0 += 1;
                assert!(slot.1 == 0 || slot.1 == w);
                slot.1 = w;
            })
            .unwrap();
            assert_eq!(total, den as u128);
            let nfact = factorial(n);
            for (pattern, (states, weight)) in per_pattern {
                assert!(pattern_is_valid(&pattern));
                assert_eq!(states, nfact, "each pattern pairs with every perm1");
                let gamma = distinct_count(&pattern[..2]) as u64;
                let theta = distinct_count(&pattern[..4]) as u64;
                let mu = distinct_count(&pattern[..8]) as u64;
                assert_eq!(
                    weight,
                    factorial(n - gamma as usize)
                        * factorial(n - theta as usize)
                        * factorial(n - mu as usize)
                );
            }
        }
    }

    #[test]
    fn pattern_probability_matches_the_factorial_ratios() {
        // gamma=2, theta=4, mu=4 at n=4: the stage probabilities are
        // (1/24)(1/24)(1/12)(1/16) = 1/110592.
        let m = sample_matrix(4);
        let target: [usize; 16] = [0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3];
        assert!(pattern_is_valid(&target));
        let mut weight_sum: u128 = 0;
        let den = for_each_coupling_state(&m, |d, w| {
            if d.i_vec == target {
                assert_eq!((d.gamma, d.theta, d.mu), (2, 4, 4));
                weight_sum += w as u128;
            }
        })
        .unwrap();
        let probability = weight_sum as f64 / den as f64;
        let by_formula = (1.0 / 24.0) * (1.0 / 24.0) * (1.0 / 12.0) * (1.0 / 16.0);
        assert_abs_diff_eq!(probability, by_formula, epsilon = 1e-18);
        assert_eq!(weight_sum, 48);
    }

    #[test]
    fn consistent_perm1_count_given_the_j_images() {
        // Fixing the distinguishable images leaves (n - rho)! completions
        // of perm1, which is exactly the extra factor in the joint law.
        let m = sample_matrix(3);
        let mut per_joint: HashMap<([usize; 16], [usize; 16]), u64> = HashMap::new();
        for_each_coupling_state(&m, |d, _| {
            *per_joint.entry((d.i_vec, d.j_vec)).or_insert(0) += 1;
        })
        .unwrap();
        for ((i_vec, _), count) in per_joint {
            let rho = distinct_count(&i_vec);
            assert_eq!(count, factorial(3 - rho.min(3)));
        }
    }

    #[test]
    fn exact_law_marginals_are_uniform() {
        let m = sample_matrix(3).standardized().unwrap();
        let law = coupling_exact_law(&m).unwrap();
        assert_eq!(law.denominator, 9 * 6u64.pow(4));
        assert_abs_diff_eq!(law.total, 1.0, epsilon = 1e-15);
        for marginal in &law.perm_marginals {
            assert_eq!(marginal.len(), 6);
            for &p in marginal {
                assert_abs_diff_eq!(p, 1.0 / 6.0, epsilon = 1e-15);
            }
        }
        for &p in &law.pair_probs {
            assert_abs_diff_eq!(p, 1.0 / 9.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(law.mean_entry, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.variance_identity, 1.0, epsilon = 1e-12);
        assert!(law.pair_factorization_tv < 1e-13);
    }

    #[test]
    fn guards() {
        let tiny = build_matrix(&[vec![1.0]]).unwrap();
        assert!(matches!(
            sample_coupling(&tiny, 1),
            Err(PermError::TooSmall { n: 1, min: 2 })
        ));
        let m5 = sample_matrix(5);
        assert!(matches!(
            coupling_exact_law(&m5),
            Err(PermError::LawTooLarge { n: 5, max: 4 })
        ));
        let m = sample_matrix(4);
        assert_eq!(
            coupling_mc_batch(&m, 0, 1).unwrap_err(),
            PermError::NoDraws
        );
        let m9 = sample_matrix(9);
        assert!(matches!(
            coupling_mc_batch(&m9, 10, 1),
            Err(PermError::AboveCutoff { n: 9, cutoff: 8 })
        ));
    }

    #[test]
    fn batch_paths_agree_bit_for_bit() {
        let m = sample_matrix(4);
        let par = coupling_mc_batch(&m, 20_000, 3).unwrap();
        let seq = coupling_mc_batch_seq(&m, 20_000, 3).unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.perm5_counts.iter().sum::<u64>(), 20_000);
        assert_eq!(par.pair_counts.iter().sum::<u64>(), 20_000);
        assert_eq!(par.product_sum.to_bits(), seq.product_sum.to_bits());
    }
}
