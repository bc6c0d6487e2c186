#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wicksys::chaos::{ChaosExpansion, MultiIndex, TruncationPolicy, WeightOrder};
use wicksys::continuous::GridSignal;
use wicksys::discrete::DiscreteSignal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(k: u32) -> WeightOrder {
    WeightOrder::new(k).unwrap()
}

pub fn policy(j: u32, d: u32) -> TruncationPolicy {
    TruncationPolicy::new(j, d).unwrap()
}

/// Sparse complex expansion with total degree at most `degree`.
pub fn sparse_expansion(rng: &mut impl Rng, policy: TruncationPolicy, degree: u32, density: f64) -> ChaosExpansion {
    let mut terms: Vec<(MultiIndex, Complex64)> = Vec::new();
    for a in policy.basis() {
        if a.degree() <= degree && rng.random_bool(density) {
            terms.push((a, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    ChaosExpansion::from_terms(policy, terms).unwrap()
}

/// Random signal on `[start, start + len)` with sparse samples.
pub fn random_signal(rng: &mut impl Rng, policy: TruncationPolicy, start: i64, len: i64, degree: u32) -> DiscreteSignal {
    let samples: Vec<_> = (start..start + len)
        .map(|n| (n, sparse_expansion(rng, policy, degree, 0.6)))
        .collect();
    DiscreteSignal::from_samples(policy, samples).unwrap()
}

pub fn random_grid(rng: &mut impl Rng, policy: TruncationPolicy, t0: f64, dt: f64, n: usize, degree: u32) -> GridSignal {
    let samples = (0..n).map(|_| sparse_expansion(rng, policy, degree, 0.7)).collect();
    GridSignal::new(t0, dt, policy, samples).unwrap()
}

pub fn random_point(rng: &mut impl Rng, vars: usize, radius: f64) -> Vec<Complex64> {
    (0..vars)
        .map(|_| Complex64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius)))
        .collect()
}

pub fn rel_close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}
