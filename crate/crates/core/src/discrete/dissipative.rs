use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::chaos::{order_gap, TruncationPolicy, WeightOrder};
use crate::error::{Error, Result};
use crate::operators::{
    multiplier_norm_bound, operator_norm, vage_upper_bound, BasisEnumeration, LinearMap,
    MultiplierMatrix, NormMethod, POWER_TOLERANCE,
};
use crate::report::{Criterion, ReportParameters, StabilityReport, TimeDomain, Witness};

use super::signal::DiscreteSignal;

/// Largest `N_time · B` accepted by [`dissipativity_check`].
pub const TOEPLITZ_MAX_DIM: usize = 16_384;

/// Lower-triangular block Toeplitz operator on `ℓ₂({0..N−1}) ⊗ ℋ_k`, with
/// block `(n, m)` equal to `T_{h_{n−m}}`.
#[derive(Clone, Debug)]
pub struct BlockToeplitz {
    blocks: Vec<MultiplierMatrix>,
    n_time: usize,
    block_dim: usize,
}

impl BlockToeplitz {
    /// `blocks[d]` is `T_{h_d}`; lags beyond the list are zero.
    pub fn new(blocks: Vec<MultiplierMatrix>, n_time: usize, block_dim: usize) -> Self {
        let mut blocks = blocks;
        blocks.truncate(n_time);
        Self {
            blocks,
            n_time,
            block_dim,
        }
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn segment(&self, x: &DVector<Complex64>, m: usize) -> DVector<Complex64> {
        x.rows(m * self.block_dim, self.block_dim).into_owned()
    }

    fn stack(&self, parts: Vec<DVector<Complex64>>) -> DVector<Complex64> {
        let b = self.block_dim;
        let mut out = DVector::zeros(self.n_time * b);
        for (n, part) in parts.into_iter().enumerate() {
            out.rows_mut(n * b, b).copy_from(&part);
        }
        out
    }
}

impl LinearMap for BlockToeplitz {
    fn dim_in(&self) -> usize {
        self.n_time * self.block_dim
    }

    fn dim_out(&self) -> usize {
        self.dim_in()
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let parts = (0..self.n_time)
            .into_par_iter()
            .map(|n| {
                let mut acc = DVector::zeros(self.block_dim);
                for (d, block) in self.blocks.iter().enumerate().take(n + 1) {
                    acc += block.apply(&self.segment(x, n - d));
                }
                acc
            })
            .collect();
        self.stack(parts)
    }

    fn apply_adjoint(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        let parts = (0..self.n_time)
            .into_par_iter()
            .map(|m| {
                let mut acc = DVector::zeros(self.block_dim);
                for (d, block) in self.blocks.iter().enumerate() {
                    if m + d >= self.n_time {
                        break;
                    }
                    acc += block.apply_adjoint(&self.segment(y, m + d));
                }
                acc
            })
            .collect();
        self.stack(parts)
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        let b = self.block_dim;
        let mut out = DMatrix::zeros(self.dim_out(), self.dim_in());
        for (d, block) in self.blocks.iter().enumerate() {
            let dense = block.to_dense();
            for m in 0..self.n_time - d {
                let n = m + d;
                out.view_mut((n * b, m * b), (b, b)).copy_from(&dense);
            }
        }
        out
    }

    fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(d, block)| {
                let f = block.frobenius_norm();
                (self.n_time - d) as f64 * f * f
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Contractivity of `u ↦ h ∗ u` on `ℓ₂(ℕ₀) ⊗ ℋ_k`.
///
/// The largest singular value of the `N_time`-step, `policy`-truncated block
/// Toeplitz matrix is a lower bound for the operator norm; exceeding
/// `1 + tol` refutes dissipativity, with the top right singular vector as
/// witness input. The upper bound `Σ_n ‖T_{h_n}‖` uses, per tap, the smaller of
/// the triangle bound and (when `l` is given with `k > l + 1`) the Våge bound;
/// it certifies when at most `1 + tol`. Anything in between is inconclusive.
pub fn dissipativity_check(
    h: &DiscreteSignal,
    k: WeightOrder,
    l: Option<WeightOrder>,
    policy: TruncationPolicy,
    n_time: usize,
    tol: f64,
) -> Result<StabilityReport> {
    if !h.is_causal() {
        return Err(Error::InvalidArgument("the impulse response must vanish for n < 0".into()));
    }
    if n_time == 0 {
        return Err(Error::InvalidArgument("n_time must be positive".into()));
    }
    if let Some(l) = l {
        order_gap(k, l)?;
    }
    let h = DiscreteSignal::from_samples(policy, h.iter().map(|(n, f)| (n, f.clone())))?;
    let basis = Arc::new(BasisEnumeration::new(policy));
    let b = basis.len();
    let dim = n_time.saturating_mul(b);
    if dim > TOEPLITZ_MAX_DIM {
        return Err(Error::SizeCap {
            size: dim,
            cap: TOEPLITZ_MAX_DIM,
        });
    }

    let mut params = ReportParameters::new(k.get(), policy, tol);
    params.l = l.map(WeightOrder::get);
    params.n_time = Some(n_time);
    let mut r = StabilityReport::new(Criterion::Dissipative, TimeDomain::Discrete, params);
    r.vacuous = h.is_empty();

    let mut upper = 0.0;
    for (_, hn) in h.iter() {
        let mut t = multiplier_norm_bound(hn, k);
        if let Some(l) = l {
            t = t.min(vage_upper_bound(hn, k, l, tol)?);
        }
        upper += t;
    }
    r.set_upper(upper, "sum over n of min(triangle bound, A(k-l)·‖h_n‖_l) on ‖T_{h_n}‖");

    let lags = h.support().map_or(0, |(_, hi)| usize::try_from(hi).unwrap_or(usize::MAX).saturating_add(1));
    let blocks: Vec<MultiplierMatrix> = (0..lags.min(n_time))
        .into_par_iter()
        .map(|d| MultiplierMatrix::with_basis(&h.sample(d as i64), k, basis.clone()))
        .collect::<Result<_>>()?;
    let op = BlockToeplitz::new(blocks, n_time, b);

    match operator_norm(&op, NormMethod::Auto, POWER_TOLERANCE) {
        Ok(est) => {
            r.set_lower(est.value, "largest singular value of the truncated block Toeplitz matrix");
            r.quantity("sigma_max", est.value);
            if est.value > 0.0 {
                let mut u = DiscreteSignal::new(policy);
                for m in 0..n_time {
                    let seg = est.input.rows(m * b, b).into_owned();
                    u.add(m as i64, &basis.from_weighted(&seg, k)?)?;
                }
                r.witness = Some(Witness::Discrete(u));
            }
        }
        Err(Error::NoConvergence { iterations, lower, upper }) => {
            r.set_lower(lower, "power iteration lower estimate (not converged)");
            r.note(format!(
                "power iteration stopped after {iterations} iterations; truncated norm in [{lower}, {upper}]"
            ));
        }
        Err(e) => return Err(e),
    }
    r.decide(Some(1.0));
    Ok(r)
}
