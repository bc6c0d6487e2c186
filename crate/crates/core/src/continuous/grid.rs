use serde::{Deserialize, Deserializer, Serialize};

use crate::chaos::{ChaosExpansion, TruncationPolicy, WeightOrder};
use crate::error::{Error, Result};

/// Samples `f(t0 + i·dt)`, `i = 0..N`, of a continuous `ℋ_k`-valued signal
/// that vanishes off `[t0, t0 + (N−1)dt]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSignal {
    t0: f64,
    dt: f64,
    policy: TruncationPolicy,
    samples: Vec<ChaosExpansion>,
}

/// Trapezoidal weights `[½, 1, …, 1, ½]`; a single sample is read as a
/// point mass of weight 1.
pub fn trapezoid_weights(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let mut w = vec![1.0; n];
            w[0] = 0.5;
            w[n - 1] = 0.5;
            w
        }
    }
}

impl GridSignal {
    pub fn new(t0: f64, dt: f64, policy: TruncationPolicy, samples: Vec<ChaosExpansion>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::GridMismatch(format!("start time {t0} is not finite")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::GridMismatch(format!("time step {dt} must be positive and finite")));
        }
        let samples = samples
            .iter()
            .map(|f| f.with_policy(policy))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t0,
            dt,
            policy,
            samples,
        })
    }

    /// `f(t_i) = g(t_i)·1` for a real function `g`.
    pub fn deterministic(t0: f64, dt: f64, n: usize, policy: TruncationPolicy, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(t0, dt, n, policy, |t| ChaosExpansion::constant(policy, g(t)))
    }

    pub fn from_fn(
        t0: f64,
        dt: f64,
        n: usize,
        policy: TruncationPolicy,
        f: impl Fn(f64) -> ChaosExpansion,
    ) -> Result<Self> {
        let samples = (0..n).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::new(t0, dt, policy, samples)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn samples(&self) -> &[ChaosExpansion] {
        &self.samples
    }

    /// `dt · Σ_i w_i v_i` with trapezoidal weights.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let w = trapezoid_weights(values.len());
        self.dt * values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>()
    }

    pub fn norms_k(&self, k: WeightOrder) -> Vec<f64> {
        self.samples.iter().map(|f| f.norm_k(k)).collect()
    }

    /// `(∫ ‖f(t)‖_k² dt)^{1/2}` by the trapezoidal rule.
    pub fn l2_norm_k(&self, k: WeightOrder) -> f64 {
        let sq: Vec<f64> = self.norms_k(k).iter().map(|v| v * v).collect();
        self.integrate(&sq).sqrt()
    }

    pub fn sup_norm_k(&self, k: WeightOrder) -> f64 {
        self.norms_k(k).into_iter().fold(0.0, f64::max)
    }

    /// Same grid, samples mapped through `f`.
    pub fn map_samples(&self, f: impl Fn(&ChaosExpansion) -> ChaosExpansion) -> Result<Self> {
        Self::new(self.t0, self.dt, self.policy, self.samples.iter().map(f).collect())
    }

    /// Largest coefficient difference, requiring identical grids.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() || (self.t0 - other.t0).abs() > 1e-12 * self.dt || !same_step(self.dt, other.dt) {
            return Err(Error::GridMismatch("signals live on different grids".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max))
    }
}

pub(crate) fn same_step(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    t0: f64,
    dt: f64,
    policy: TruncationPolicy,
    samples: Vec<ChaosExpansion>,
}

impl<'de> Deserialize<'de> for GridSignal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = GridRepr::deserialize(deserializer)?;
        let policy = TruncationPolicy::new(r.policy.max_var, r.policy.max_degree).map_err(serde::de::Error::custom)?;
        GridSignal::new(r.t0, r.dt, policy, r.samples).map_err(serde::de::Error::custom)
    }
}
