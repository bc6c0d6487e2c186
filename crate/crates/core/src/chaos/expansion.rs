use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{MultiIndex, TruncationPolicy, WeightOrder};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A truncated chaos expansion `f = Σ c_α H_α`.
///
/// Terms are kept sparse and canonical: every stored index fits the policy
/// and no stored coefficient is exactly zero. Iteration follows the graded
/// order of [`MultiIndex`], so serialization is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosExpansion {
    policy: TruncationPolicy,
    terms: BTreeMap<MultiIndex, Complex64>,
}

/// Terms dropped because a product left the truncation box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationLoss {
    pub dropped_terms: usize,
}

impl TruncationLoss {
    pub fn is_lossless(&self) -> bool {
        self.dropped_terms == 0
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            dropped_terms: self.dropped_terms + other.dropped_terms,
        }
    }
}

impl ChaosExpansion {
    /// The zero expansion.
    pub fn zero(policy: TruncationPolicy) -> Self {
        Self {
            policy,
            terms: BTreeMap::new(),
        }
    }

    /// The deterministic expansion `c·1`.
    pub fn constant(policy: TruncationPolicy, c: impl Into<Complex64>) -> Self {
        let mut f = Self::zero(policy);
        let c = c.into();
        if c != ZERO {
            f.terms.insert(MultiIndex::zero(), c);
        }
        f
    }

    /// `c·H_α`.
    pub fn monomial(
        policy: TruncationPolicy,
        alpha: MultiIndex,
        c: impl Into<Complex64>,
    ) -> Result<Self> {
        let mut f = Self::zero(policy);
        f.add_term(alpha, c.into())?;
        Ok(f)
    }

    /// Builds an expansion, summing repeated indices.
    pub fn from_terms<I, C>(policy: TruncationPolicy, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
        C: Into<Complex64>,
    {
        let mut f = Self::zero(policy);
        for (alpha, c) in terms {
            f.add_term(alpha, c.into())?;
        }
        Ok(f)
    }

    /// Adds `c·H_α`, rejecting indices outside the policy.
    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        self.policy.check(&alpha)?;
        self.accumulate(alpha, c);
        Ok(())
    }

    fn accumulate(&mut self, alpha: MultiIndex, c: Complex64) {
        if c == ZERO {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == ZERO {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    /// Coefficient of `H_α` (zero when absent).
    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or(ZERO)
    }

    /// The expectation `c_0`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(&MultiIndex::zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Only the `α = 0` term is present (or none at all).
    pub fn is_deterministic(&self) -> bool {
        self.terms.keys().all(MultiIndex::is_zero)
    }

    /// Largest variable index carrying a term.
    pub fn max_var(&self) -> u32 {
        self.terms.keys().map(MultiIndex::max_var).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Re-homes the expansion into another policy; fails if a term does not fit.
    pub fn with_policy(&self, policy: TruncationPolicy) -> Result<Self> {
        for alpha in self.terms.keys() {
            policy.check(alpha)?;
        }
        Ok(Self {
            policy,
            terms: self.terms.clone(),
        })
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.policy);
        for (alpha, v) in &self.terms {
            out.accumulate(alpha.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            policy: self.policy,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v.conj())).collect(),
        }
    }

    /// `self + c·other`; the result lives on the joined policy.
    pub fn axpy(&self, c: impl Into<Complex64>, other: &Self) -> Self {
        let c = c.into();
        let mut out = Self {
            policy: self.policy.join(&other.policy),
            terms: self.terms.clone(),
        };
        for (alpha, v) in &other.terms {
            out.accumulate(alpha.clone(), v * c);
        }
        out
    }

    /// Wick product `self ◊ other`, with `H_α ◊ H_β = H_{α+β}`.
    ///
    /// The result lives on the joined policy; products leaving it are dropped
    /// and counted in the returned [`TruncationLoss`].
    pub fn wick(&self, other: &Self) -> (Self, TruncationLoss) {
        let policy = self.policy.join(&other.policy);
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        let mut loss = TruncationLoss::default();
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                let gamma = alpha.add(beta);
                if policy.admits(&gamma) {
                    *acc.entry(gamma).or_insert(ZERO) += a * b;
                } else {
                    loss.dropped_terms += 1;
                }
            }
        }
        acc.retain(|_, v| *v != ZERO);
        (
            Self {
                policy,
                terms: acc,
            },
            loss,
        )
    }

    /// `‖f‖_k = (Σ |c_α|² (2N)^{−kα})^{1/2}`.
    pub fn norm_k(&self, k: WeightOrder) -> f64 {
        self.norm_q(k.as_f64())
    }

    /// The same norm for a real order `q`.
    pub fn norm_q(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(alpha, c)| c.norm_sqr() * alpha.weight_unchecked(-q))
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨f, g⟩_k = Σ f_α ḡ_α (2N)^{−kα}`, conjugate-linear in `g`.
    pub fn inner_k(&self, other: &Self, k: WeightOrder) -> Complex64 {
        let q = -k.as_f64();
        let (small, large, swap) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (alpha, a) in &small.terms {
            if let Some(b) = large.terms.get(alpha) {
                let (f, g) = if swap { (b, a) } else { (a, b) };
                acc += f * g.conj() * alpha.weight_unchecked(q);
            }
        }
        acc
    }

    /// Norm of the white noise space, `(Σ |c_α|² α!)^{1/2}`.
    pub fn white_noise_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|(alpha, c)| c.norm_sqr() * alpha.factorial())
            .sum::<f64>()
            .sqrt()
    }

    /// Hermite transform `I(f)(z) = Σ c_α z^α`.
    pub fn hermite_transform(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, c)| c * alpha.monomial(z))
            .sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.axpy(-1.0, other).max_abs()
    }
}

impl Add for &ChaosExpansion {
    type Output = ChaosExpansion;

    fn add(self, rhs: Self) -> ChaosExpansion {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &ChaosExpansion {
    type Output = ChaosExpansion;

    fn sub(self, rhs: Self) -> ChaosExpansion {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &ChaosExpansion {
    type Output = ChaosExpansion;

    fn neg(self) -> ChaosExpansion {
        self.scale(-1.0)
    }
}

// --- JSON interchange ---------------------------------------------------
//
// {"policy": {"J": int, "D": int},
//  "terms": [{"alpha": [[j, a], ...], "re": float, "im": float}, ...]}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<(u32, u32)>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionRepr {
    policy: TruncationPolicy,
    terms: Vec<TermRepr>,
}

impl TryFrom<ExpansionRepr> for ChaosExpansion {
    type Error = Error;

    fn try_from(repr: ExpansionRepr) -> Result<Self> {
        let policy = TruncationPolicy::new(repr.policy.max_var, repr.policy.max_degree)?;
        let mut f = Self::zero(policy);
        for t in repr.terms {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Malformed("non-finite coefficient".into()));
            }
            let alpha = MultiIndex::from_pairs(&t.alpha)?;
            if f.terms.contains_key(&alpha) {
                return Err(Error::Malformed(format!("duplicate multi-index {alpha}")));
            }
            f.add_term(alpha, Complex64::new(t.re, t.im))?;
        }
        Ok(f)
    }
}

impl Serialize for ChaosExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = ExpansionRepr {
            policy: self.policy,
            terms: self
                .terms
                .iter()
                .map(|(alpha, c)| TermRepr {
                    alpha: alpha.pairs().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl ChaosExpansion {
    /// Parses the JSON interchange form, keeping policy errors distinct from
    /// malformed documents.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let repr: ExpansionRepr = serde_json::from_value(value)?;
        Self::try_from(repr)
    }
}

impl<'de> Deserialize<'de> for ChaosExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ExpansionRepr::deserialize(deserializer)?;
        ChaosExpansion::try_from(repr).map_err(serde::de::Error::custom)
    }
}
