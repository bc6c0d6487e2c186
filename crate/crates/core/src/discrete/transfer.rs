use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::chaos::{ChaosExpansion, EvaluationPoint, TruncationPolicy};
use crate::error::{Error, Result};

use super::signal::{zeta_power, DiscreteSignal};

/// Generalized transfer function `ℋ(ζ, z) = Σ_n ζⁿ I(h_n)(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    policy: TruncationPolicy,
    coeffs: BTreeMap<i64, ChaosExpansion>,
    causal: bool,
}

impl TransferFunction {
    /// The transfer function of an impulse response; causal iff the
    /// response vanishes for `n < 0`.
    pub fn from_signal(h: &DiscreteSignal) -> Self {
        Self {
            policy: h.policy(),
            coeffs: h.iter().map(|(n, f)| (n, f.clone())).collect(),
            causal: h.is_causal(),
        }
    }

    /// Builds from explicit coefficients; `causal` forbids negative powers.
    pub fn from_coeffs<I>(policy: TruncationPolicy, coeffs: I, causal: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, ChaosExpansion)>,
    {
        let signal = DiscreteSignal::from_samples(policy, coeffs)?;
        if causal && !signal.is_causal() {
            return Err(Error::InvalidArgument(
                "causal transfer function with a negative-power coefficient".into(),
            ));
        }
        let mut t = Self::from_signal(&signal);
        t.causal = causal;
        Ok(t)
    }

    /// A causal transfer function with coefficients `s_0, s_1, …`.
    pub fn causal(policy: TruncationPolicy, coeffs: Vec<ChaosExpansion>) -> Result<Self> {
        Self::from_coeffs(policy, (0..).zip(coeffs), true)
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn is_causal(&self) -> bool {
        self.causal
    }

    /// The coefficient of `ζⁿ`.
    pub fn coeff(&self, n: i64) -> ChaosExpansion {
        self.coeffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| ChaosExpansion::zero(self.policy))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &ChaosExpansion)> {
        self.coeffs.iter().map(|(n, f)| (*n, f))
    }

    /// Largest power of `ζ` with a non-zero coefficient.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn eval(&self, zeta: Complex64, z: &EvaluationPoint) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(n, f)| zeta_power(zeta, *n) * f.hermite_transform(z.coords()))
            .sum()
    }

    /// `Σ ζⁿ h_n(0)`, the transfer function of the deterministic part.
    pub fn nonrandom_part(&self, zeta: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(n, f)| zeta_power(zeta, *n) * f.mean())
            .sum()
    }
}

/// `ℋ(ζ, z)`; see [`TransferFunction::eval`].
pub fn transfer_eval(h: &TransferFunction, zeta: Complex64, z: &EvaluationPoint) -> Complex64 {
    h.eval(zeta, z)
}
