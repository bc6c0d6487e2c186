use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::chaos::{ChaosExpansion, TruncationPolicy, WeightOrder};
use crate::error::{Error, Result};

/// A finitely supported sequence `(u_n)` of chaos expansions on one policy.
///
/// Zero samples are not stored, so two signals are equal iff they agree at
/// every `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteSignal {
    policy: TruncationPolicy,
    samples: BTreeMap<i64, ChaosExpansion>,
}

impl DiscreteSignal {
    /// The zero signal.
    pub fn new(policy: TruncationPolicy) -> Self {
        Self {
            policy,
            samples: BTreeMap::new(),
        }
    }

    /// Builds a signal, re-homing every sample into `policy`.
    pub fn from_samples<I>(policy: TruncationPolicy, samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, ChaosExpansion)>,
    {
        let mut s = Self::new(policy);
        for (n, f) in samples {
            s.add(n, &f)?;
        }
        Ok(s)
    }

    /// A deterministic signal `u_n = c_n·1`.
    pub fn deterministic(policy: TruncationPolicy, taps: &[(i64, f64)]) -> Self {
        let mut s = Self::new(policy);
        for &(n, c) in taps {
            s.accumulate(n, ChaosExpansion::constant(policy, c));
        }
        s
    }

    /// `u_n = f` at `n`, zero elsewhere.
    pub fn impulse(n: i64, f: ChaosExpansion) -> Self {
        let mut s = Self::new(f.policy());
        s.accumulate(n, f);
        s
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    /// Adds `f` to the sample at `n`.
    pub fn add(&mut self, n: i64, f: &ChaosExpansion) -> Result<()> {
        let f = f.with_policy(self.policy)?;
        self.accumulate(n, f);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, n: i64, f: ChaosExpansion) {
        if f.is_zero() {
            return;
        }
        let sum = match self.samples.remove(&n) {
            Some(cur) => &cur + &f,
            None => f,
        };
        if !sum.is_zero() {
            self.samples.insert(n, sum);
        }
    }

    /// The sample at `n`, if non-zero.
    pub fn get(&self, n: i64) -> Option<&ChaosExpansion> {
        self.samples.get(&n)
    }

    /// The sample at `n`, zero outside the support.
    pub fn sample(&self, n: i64) -> ChaosExpansion {
        self.samples
            .get(&n)
            .cloned()
            .unwrap_or_else(|| ChaosExpansion::zero(self.policy))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ChaosExpansion)> {
        self.samples.iter().map(|(n, f)| (*n, f))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `[n_min, n_max]` of the non-zero samples.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.samples.keys().next()?;
        let hi = *self.samples.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn is_causal(&self) -> bool {
        self.support().is_none_or(|(lo, _)| lo >= 0)
    }

    /// True when every sample is deterministic.
    pub fn is_deterministic(&self) -> bool {
        self.samples.values().all(ChaosExpansion::is_deterministic)
    }

    /// `(S u)_n = u_{n − by}`.
    pub fn shift(&self, by: i64) -> Self {
        Self {
            policy: self.policy,
            samples: self.samples.iter().map(|(n, f)| (n + by, f.clone())).collect(),
        }
    }

    /// Keeps the samples with `n ≥ 0`.
    pub fn causal_part(&self) -> Self {
        Self {
            policy: self.policy,
            samples: self.samples.range(0..).map(|(n, f)| (*n, f.clone())).collect(),
        }
    }

    pub fn map_samples(&self, mut f: impl FnMut(&ChaosExpansion) -> ChaosExpansion) -> Self {
        let mut s = Self::new(self.policy);
        for (n, u) in &self.samples {
            s.accumulate(*n, f(u));
        }
        s
    }

    /// `‖u_n‖_k` for every stored `n`.
    pub fn norms_k(&self, k: WeightOrder) -> Vec<(i64, f64)> {
        self.samples.iter().map(|(n, f)| (*n, f.norm_k(k))).collect()
    }

    /// `sup_n ‖u_n‖_k`.
    pub fn sup_norm_k(&self, k: WeightOrder) -> f64 {
        self.samples.values().map(|f| f.norm_k(k)).fold(0.0, f64::max)
    }

    /// `Σ_n ‖u_n‖_k`.
    pub fn l1_norm_k(&self, k: WeightOrder) -> f64 {
        self.samples.values().map(|f| f.norm_k(k)).sum()
    }

    /// `(Σ_n ‖u_n‖_k²)^{1/2}`.
    pub fn l2_norm_k(&self, k: WeightOrder) -> f64 {
        self.energy_k(k).sqrt()
    }

    /// `Σ_n ‖u_n‖_k²`.
    pub fn energy_k(&self, k: WeightOrder) -> f64 {
        self.samples
            .values()
            .map(|f| {
                let v = f.norm_k(k);
                v * v
            })
            .sum()
    }

    /// Largest coefficient difference over all samples.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let zero = ChaosExpansion::zero(self.policy);
        let mut keys: Vec<i64> = self.samples.keys().chain(other.samples.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|n| {
                let a = self.samples.get(&n).unwrap_or(&zero);
                let b = other.samples.get(&n).unwrap_or(&zero);
                a.max_abs_diff(b)
            })
            .fold(0.0, f64::max)
    }

    /// `û(ζ, z) = Σ_n ζⁿ I(u_n)(z)`.
    pub fn z_transform(&self, zeta: Complex64, z: &[Complex64]) -> Complex64 {
        self.samples
            .iter()
            .map(|(n, f)| zeta_power(zeta, *n) * f.hermite_transform(z))
            .sum()
    }
}

pub(crate) fn zeta_power(zeta: Complex64, n: i64) -> Complex64 {
    match i32::try_from(n) {
        Ok(n) => zeta.powi(n),
        Err(_) => zeta.powf(n as f64),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalRepr {
    policy: TruncationPolicy,
    samples: BTreeMap<String, ChaosExpansion>,
}

impl<'de> Deserialize<'de> for DiscreteSignal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SignalRepr::deserialize(deserializer)?;
        let policy = TruncationPolicy::new(repr.policy.max_var, repr.policy.max_degree)
            .map_err(serde::de::Error::custom)?;
        let mut samples = Vec::with_capacity(repr.samples.len());
        for (key, f) in repr.samples {
            let n: i64 = key
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("time index \"{key}\" is not an integer")))?;
            samples.push((n, f));
        }
        DiscreteSignal::from_samples(policy, samples).map_err(serde::de::Error::custom)
    }
}

/// Signals on different policies cannot be combined.
pub(crate) fn same_policy(a: TruncationPolicy, b: TruncationPolicy) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PolicyMismatch {
            expected_var: a.max_var,
            expected_degree: a.max_degree,
            found_var: b.max_var,
            found_degree: b.max_degree,
        })
    }
}
