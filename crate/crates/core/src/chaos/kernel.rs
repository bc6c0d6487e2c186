//! The reproducing kernels `K_k(z, w) = Σ z^α w̄^α (2N)^{kα}` and the
//! neighbourhoods `𝕂_k` on which they converge.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{TruncationPolicy, WeightOrder};

/// A point `z = (z_1, ..., z_J)`, extended by zeros beyond its length.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvaluationPoint(pub Vec<Complex64>);

impl EvaluationPoint {
    pub fn new(z: Vec<Complex64>) -> Self {
        Self(z)
    }

    pub fn origin() -> Self {
        Self(Vec::new())
    }

    pub fn real(z: &[f64]) -> Self {
        Self(z.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    /// Coordinate `z_j` (variables counted from 1).
    pub fn coord(&self, var: u32) -> Complex64 {
        self.0
            .get(var as usize - 1)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest per-variable ratio `|z_j|² (2j)^k`; `𝕂_k` needs it below 1.
    pub fn geometric_ratio(&self, k: WeightOrder) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, z)| z.norm_sqr() * (2.0 * (i + 1) as f64).powf(k.as_f64()))
            .fold(0.0, f64::max)
    }
}

/// A truncated kernel value together with the distance to the full sum over
/// the policy's variables (infinite when that sum diverges).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub tail: f64,
}

impl KernelValue {
    pub fn converges(&self) -> bool {
        self.tail.is_finite()
    }
}

/// `Σ_{α in policy} z^α w̄^α (2N)^{kα}` with a tail estimate.
///
/// Restricted to the policy's `J` variables the full sum is the product
/// `∏_j (1 − z_j w̄_j (2j)^k)^{−1}`, available whenever every factor ratio has
/// modulus below one; the tail is the distance to it.
pub fn kernel_k(
    z: &EvaluationPoint,
    w: &EvaluationPoint,
    k: WeightOrder,
    policy: TruncationPolicy,
) -> KernelValue {
    let ratios: Vec<Complex64> = (1..=policy.max_var)
        .map(|j| z.coord(j) * w.coord(j).conj() * (2.0 * f64::from(j)).powf(k.as_f64()))
        .collect();
    let value: Complex64 = policy
        .basis()
        .iter()
        .map(|alpha| alpha.monomial(&ratios))
        .sum();
    let tail = if ratios.iter().all(|r| r.norm() < 1.0) {
        let full: Complex64 = ratios
            .iter()
            .map(|r| Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - r))
            .product();
        (full - value).norm()
    } else {
        f64::INFINITY
    };
    KernelValue { value, tail }
}

/// Membership of `z` in `𝕂_k`, judged on the policy slice.
///
/// True iff `|z_j|² (2j)^k < 1` for every coordinate and the truncated
/// `K_k(z, z)` is within relative tolerance `tol` of the full product.
pub fn membership_kk(
    z: &EvaluationPoint,
    k: WeightOrder,
    policy: TruncationPolicy,
    tol: f64,
) -> bool {
    if z.geometric_ratio(k) >= 1.0 {
        return false;
    }
    // coordinates beyond J play no role in the truncated kernel
    let kv = kernel_k(z, z, k, policy);
    kv.converges() && kv.tail <= tol * kv.value.norm().max(1.0)
}
