//! Enumeration of ordered index tuples under a sampling budget.
//!
//! Small problems are enumerated exhaustively in lexicographic order. When the
//! number of `k`-subsets of `m` grid points exceeds the budget, the sample is
//! made of every contiguous window plus seeded uniformly random subsets. The
//! returned list is always sorted lexicographically so downstream reductions
//! do not depend on generation order.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Default number of tuples evaluated before switching to sampling.
pub const DEFAULT_BUDGET: usize = 50_000;

/// Default seed of the tuple sampler.
pub const DEFAULT_SEED: u64 = 20_041_118;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub budget: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

impl Sampling {
    pub fn with_seed(seed: u64) -> Self {
        Sampling {
            seed,
            ..Default::default()
        }
    }
}

/// Number of `k`-subsets of an `m`-set, saturating at `u128::MAX`.
pub fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Strictly increasing index tuples of length `k` drawn from `0..m`.
pub fn ordered_index_tuples(m: usize, k: usize, sampling: &Sampling) -> Vec<Vec<usize>> {
    if k == 0 || k > m {
        return Vec::new();
    }
    if binomial(m, k) <= sampling.budget as u128 {
        return all_combinations(m, k);
    }

    let mut picked: BTreeSet<Vec<usize>> = (0..=m - k).map(|s| (s..s + k).collect()).collect();
    let target = sampling.budget.max(picked.len());
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut attempts = 0usize;
    let max_attempts = target.saturating_mul(20);
    while picked.len() < target && attempts < max_attempts {
        attempts += 1;
        let mut idx = sample(&mut rng, m, k).into_vec();
        idx.sort_unstable();
        picked.insert(idx);
    }
    picked.into_iter().collect()
}

fn all_combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(m, k) as usize);
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && cur[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
