//! Pathwise realization of Hermite functionals and Monte Carlo checks of the
//! chaos algebra.
//!
//! A Hermite functional is realized as `H_α(ω) = ∏_j h_{α_j}(X_j)` with `X_j`
//! i.i.d. standard normal and `h_n` the probabilists' Hermite polynomials, so
//! that `E[H_α H_β] = δ_{αβ} α!`.
//!
//! Draws are split into fixed-size chunks, each with its own ChaCha stream of
//! the same seed. Results therefore do not depend on the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ChaosExpansion, MultiIndex, TruncationPolicy};
use crate::error::{Error, Result};

const CHUNK: usize = 4096;

/// `h_n(x)` with `h_0 = 1`, `h_1 = x`, `h_{n+1} = x h_n − n h_{n−1}`.
pub fn hermite_poly(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for m in 1..n {
        let next = x * cur - f64::from(m) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// One draw of the coordinates `(X_1, ..., X_J)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSample {
    pub x: Vec<f64>,
}

impl GaussianSample {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self {
            x: (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    pub fn from_values(x: Vec<f64>) -> Self {
        Self { x }
    }
}

/// `H_α(ω) = ∏ h_{α_j}(x_j)`; coordinates missing from the sample read as 0.
pub fn eval_hermite_functional(alpha: &MultiIndex, sample: &GaussianSample) -> f64 {
    alpha
        .pairs()
        .iter()
        .map(|&(j, a)| hermite_poly(a, sample.x.get(j as usize - 1).copied().unwrap_or(0.0)))
        .product()
}

impl ChaosExpansion {
    /// Pathwise value `f(ω) = Σ c_α H_α(ω)`.
    pub fn eval_sample(&self, sample: &GaussianSample) -> Complex64 {
        self.terms()
            .map(|(alpha, c)| c * eval_hermite_functional(alpha, sample))
            .sum()
    }
}

/// Sample mean and standard error of a complex-valued statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

impl MomentEstimate {
    fn from_sums(sum: Complex64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let stderr = if n > 1 {
            let var = ((sum_sq - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            samples: n,
        }
    }

    /// `|mean − expected| / stderr`; a zero stderr gives 0 on an exact
    /// match and infinity otherwise.
    pub fn z_score(&self, expected: Complex64) -> f64 {
        let diff = (self.mean - expected).norm();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff <= 1e-12 * (1.0 + expected.norm()) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_lengths(n: usize) -> Vec<usize> {
    (0..n.div_ceil(CHUNK))
        .map(|c| CHUNK.min(n - c * CHUNK))
        .collect()
}

/// Monte Carlo estimate of `E[f(ω) · conj(g(ω))]` from `n` draws.
///
/// For real coefficients this is `E[f g]`; in general its exact value is
/// `Σ α! f_α ḡ_α`.
pub fn mc_moment(
    f: &ChaosExpansion,
    g: &ChaosExpansion,
    n: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one draw".into()));
    }
    let dim = f.max_var().max(g.max_var()) as usize;
    let partial: Vec<(Complex64, f64)> = chunk_lengths(n)
        .into_par_iter()
        .enumerate()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sum_sq = 0.0;
            for _ in 0..len {
                let s = GaussianSample::draw(&mut rng, dim);
                let v = f.eval_sample(&s) * g.eval_sample(&s).conj();
                sum += v;
                sum_sq += v.norm_sqr();
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, b), (s, q)| (a + s, b + q));
    Ok(MomentEstimate::from_sums(sum, sum_sq, n))
}

/// One row of a Monte Carlo validation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub label: String,
    pub expected_re: f64,
    pub expected_im: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr: f64,
    pub z_score: f64,
    pub pass: bool,
}

impl MomentCheck {
    fn new(label: String, expected: Complex64, est: &MomentEstimate, threshold: f64) -> Self {
        let z = est.z_score(expected);
        Self {
            label,
            expected_re: expected.re,
            expected_im: expected.im,
            mean_re: est.mean.re,
            mean_im: est.mean.im,
            stderr: est.stderr,
            z_score: z,
            pass: z <= threshold,
        }
    }
}

/// Checks `E[H_α H_β] = δ_{αβ} α!` for every unordered pair of the policy
/// slice, flagging rows whose z-score exceeds `threshold`.
pub fn orthogonality_suite(
    policy: TruncationPolicy,
    n: usize,
    seed: u64,
    threshold: f64,
) -> Result<Vec<MomentCheck>> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one draw".into()));
    }
    let basis = policy.basis();
    let b = basis.len();
    let pairs: Vec<(usize, usize)> = (0..b).flat_map(|i| (i..b).map(move |j| (i, j))).collect();
    let dim = policy.max_var as usize;

    let partial: Vec<(Vec<f64>, Vec<f64>)> = chunk_lengths(n)
        .into_par_iter()
        .enumerate()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut sum = vec![0.0; pairs.len()];
            let mut sum_sq = vec![0.0; pairs.len()];
            let mut values = vec![0.0; b];
            for _ in 0..len {
                let s = GaussianSample::draw(&mut rng, dim);
                for (v, alpha) in values.iter_mut().zip(&basis) {
                    *v = eval_hermite_functional(alpha, &s);
                }
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    let v = values[i] * values[j];
                    sum[p] += v;
                    sum_sq[p] += v * v;
                }
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = vec![0.0; pairs.len()];
    let mut sum_sq = vec![0.0; pairs.len()];
    for (s, q) in &partial {
        for p in 0..pairs.len() {
            sum[p] += s[p];
            sum_sq[p] += q[p];
        }
    }

    Ok(pairs
        .iter()
        .enumerate()
        .map(|(p, &(i, j))| {
            let expected = if i == j { basis[i].factorial() } else { 0.0 };
            let est = MomentEstimate::from_sums(Complex64::new(sum[p], 0.0), sum_sq[p], n);
            MomentCheck::new(
                format!("E[H_{} H_{}]", basis[i], basis[j]),
                Complex64::new(expected, 0.0),
                &est,
                threshold,
            )
        })
        .collect())
}

/// Random expansion with real coefficients on `{|α| ≤ degree}` of the slice.
pub fn random_expansion<R: Rng + ?Sized>(
    rng: &mut R,
    policy: TruncationPolicy,
    degree: u32,
) -> ChaosExpansion {
    let terms: Vec<(MultiIndex, f64)> = policy
        .basis()
        .into_iter()
        .filter(|a| a.degree() <= degree)
        .map(|a| (a, rng.random_range(-1.0..1.0)))
        .collect();
    ChaosExpansion::from_terms(policy, terms).expect("indices come from the policy basis")
}

/// Checks `E[f ◊ g] = f_0 g_0` on `pairs` random loss-free pairs: exactly on
/// the `α = 0` coefficient of the Wick product and empirically by sampling.
pub fn wick_expectation_suite(
    policy: TruncationPolicy,
    pairs: usize,
    n: usize,
    seed: u64,
    threshold: f64,
) -> Result<Vec<MomentCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let half = policy.max_degree / 2;
    let one = ChaosExpansion::constant(policy, 1.0);
    let mut rows = Vec::with_capacity(pairs);
    for p in 0..pairs {
        let f = random_expansion(&mut rng, policy, half);
        let g = random_expansion(&mut rng, policy, policy.max_degree - half);
        let (fg, loss) = f.wick(&g);
        debug_assert!(loss.is_lossless());
        let expected = f.mean() * g.mean();
        let exact = fg.mean() == expected;
        let est = mc_moment(&fg, &one, n, seed.wrapping_add(p as u64 + 1))?;
        let mut row = MomentCheck::new(format!("E[f{p} ◊ g{p}]"), expected, &est, threshold);
        row.pass &= exact;
        rows.push(row);
    }
    Ok(rows)
}
