//! Expectations over uniformly random arrival orders.
//!
//! Both sweeps split the work into fixed-size chunks whose boundaries do not
//! depend on the number of worker threads. Each chunk is folded sequentially
//! and chunk results are merged in chunk order, so floating-point sums are
//! bit-identical for any thread count. Monte-Carlo chunk `c` draws from
//! ChaCha8 stream `c` of the master seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Permutations per exact chunk.
const EXACT_CHUNK: u64 = 240;
/// Samples per Monte-Carlo chunk.
const SAMPLE_CHUNK: u64 = 256;

/// How to take an expectation over arrival orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SweepMode {
    /// Average over all `n!` permutations.
    Exact,
    /// Average over `samples` uniform permutations drawn from `seed`.
    MonteCarlo { samples: u64, seed: u64 },
}

/// Per-chunk accumulator. `merge` receives the tally of the following chunk.
pub trait Tally: Send + Sized {
    fn merge(&mut self, later: Self);
}

pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// The `index`-th permutation of `0..n` in lexicographic order.
pub fn nth_permutation(n: usize, mut index: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let block = factorial(k).expect("factorial overflow");
        let pick = (index / block) as usize;
        index %= block;
        out.push(pool.remove(pick));
    }
    out
}

/// Advances to the next lexicographic permutation; false after the last one.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p
        .iter()
        .rposition(|&x| x > p[i])
        .expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Folds `visit` over every permutation of `0..n`.
pub fn exact_sweep<T, M, F>(n: usize, make: M, visit: F) -> T
where
    T: Tally,
    M: Fn() -> T + Sync,
    F: Fn(&[usize], &mut T) + Sync,
{
    let total = factorial(n).expect("n! overflows u64");
    let chunks = total.div_ceil(EXACT_CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * EXACT_CHUNK;
            let end = (start + EXACT_CHUNK).min(total);
            let mut tally = make();
            let mut perm = nth_permutation(n, start);
            for k in start..end {
                visit(&perm, &mut tally);
                if k + 1 < end {
                    next_permutation(&mut perm);
                }
            }
            tally
        })
        .collect();
    merge_in_order(parts, make)
}

/// Folds `visit` over `samples` uniformly random permutations of `0..n`.
pub fn sampled_sweep<T, M, F>(n: usize, samples: u64, seed: u64, make: M, visit: F) -> T
where
    T: Tally,
    M: Fn() -> T + Sync,
    F: Fn(&[usize], &mut T) + Sync,
{
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let mut tally = make();
            let mut perm: Vec<usize> = (0..n).collect();
            for _ in 0..count {
                perm.shuffle(&mut rng);
                visit(&perm, &mut tally);
            }
            tally
        })
        .collect();
    merge_in_order(parts, make)
}

/// Dispatches on `mode`.
pub fn sweep<T, M, F>(n: usize, mode: SweepMode, make: M, visit: F) -> T
where
    T: Tally,
    M: Fn() -> T + Sync,
    F: Fn(&[usize], &mut T) + Sync,
{
    match mode {
        SweepMode::Exact => exact_sweep(n, make, visit),
        SweepMode::MonteCarlo { samples, seed } => sampled_sweep(n, samples, seed, make, visit),
    }
}

fn merge_in_order<T: Tally, M: Fn() -> T>(parts: Vec<T>, make: M) -> T {
    let mut iter = parts.into_iter();
    let mut acc = iter.next().unwrap_or_else(make);
    for part in iter {
        acc.merge(part);
    }
    acc
}

/// Running sums and sums of squares of a fixed-length vector of statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl Moments {
    pub fn new(len: usize) -> Self {
        Moments {
            count: 0,
            sum: vec![0.0; len],
            sum_sq: vec![0.0; len],
        }
    }

    pub fn push(&mut self, sample: &[f64]) {
        debug_assert_eq!(sample.len(), self.sum.len());
        self.count += 1;
        for ((s, q), &x) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(sample) {
            *s += x;
            *q += x * x;
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum.iter().map(|s| s / c).collect()
    }

    /// Standard error of each mean (sample standard deviation over `√count`).
    pub fn stderr(&self) -> Vec<f64> {
        let c = self.count as f64;
        if self.count < 2 {
            return vec![0.0; self.sum.len()];
        }
        self.sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(&s, &q)| {
                let var = ((q - s * s / c) / (c - 1.0)).max(0.0);
                (var / c).sqrt()
            })
            .collect()
    }
}

impl Tally for Moments {
    fn merge(&mut self, later: Self) {
        self.count += later.count;
        for (a, b) in self.sum.iter_mut().zip(later.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(later.sum_sq) {
            *a += b;
        }
    }
}
