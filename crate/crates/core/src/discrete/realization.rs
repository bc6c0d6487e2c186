//! Backward-shift realization `S(ζ) = D + ζ C (I − ζ A)^{−1} B` of a causal
//! multiplier, acting on power series in `ζ` with chaos-expansion
//! coefficients. Products of Hermite transforms are Wick products of the
//! underlying expansions.

use crate::chaos::{ChaosExpansion, MultiIndex, TruncationLoss, TruncationPolicy};
use crate::error::{Error, Result};

use super::transfer::TransferFunction;

/// A finite power series `f(ζ) = Σ_n ζⁿ f_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaSeries {
    policy: TruncationPolicy,
    coeffs: Vec<ChaosExpansion>,
}

impl ZetaSeries {
    pub fn new(policy: TruncationPolicy, coeffs: Vec<ChaosExpansion>) -> Self {
        let mut s = Self { policy, coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ChaosExpansion::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeff(&self, n: usize) -> ChaosExpansion {
        self.coeffs
            .get(n)
            .cloned()
            .unwrap_or_else(|| ChaosExpansion::zero(self.policy))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// The operators `A`, `B`, `C`, `D` built from a causal `S(ζ) = Σ ζⁿ s_n`.
///
/// * `A f = (f(ζ) − f(0)) / ζ` (shift down),
/// * `B x = (S(ζ) − S(0)) x / ζ`,
/// * `C f = f(0)`,
/// * `D x = S(0) x`.
#[derive(Clone, Debug)]
pub struct Realization<'a> {
    s: &'a TransferFunction,
    policy: TruncationPolicy,
}

impl<'a> Realization<'a> {
    pub fn new(s: &'a TransferFunction, policy: TruncationPolicy) -> Result<Self> {
        if !s.is_causal() {
            return Err(Error::InvalidArgument("the realized multiplier must be causal".into()));
        }
        Ok(Self { s, policy })
    }

    pub fn a(&self, f: &ZetaSeries) -> ZetaSeries {
        ZetaSeries::new(self.policy, f.coeffs.iter().skip(1).cloned().collect())
    }

    pub fn b(&self, x: &ChaosExpansion) -> (ZetaSeries, TruncationLoss) {
        let degree = self.s.degree().unwrap_or(0).max(0) as usize;
        let mut loss = TruncationLoss::default();
        let coeffs = (1..=degree)
            .map(|n| {
                let (p, l) = self.product(&self.s.coeff(n as i64), x);
                loss = loss.merge(l);
                p
            })
            .collect();
        (ZetaSeries::new(self.policy, coeffs), loss)
    }

    pub fn c(&self, f: &ZetaSeries) -> ChaosExpansion {
        f.coeff(0)
    }

    pub fn d(&self, x: &ChaosExpansion) -> (ChaosExpansion, TruncationLoss) {
        self.product(&self.s.coeff(0), x)
    }

    fn product(&self, a: &ChaosExpansion, b: &ChaosExpansion) -> (ChaosExpansion, TruncationLoss) {
        let (p, loss) = a.wick(b);
        let p = ChaosExpansion::from_terms(self.policy, p.terms().filter(|(alpha, _)| self.policy.admits(alpha)).map(|(a, c)| (a.clone(), *c)))
            .expect("filtered to the policy");
        (p, loss)
    }

    /// The `ζⁿ` coefficient of `S(ζ) x` produced by the realization:
    /// `D x` for `n = 0`, `C A^{n−1} B x` otherwise.
    pub fn coefficient(&self, n: usize, x: &ChaosExpansion) -> ChaosExpansion {
        if n == 0 {
            return self.d(x).0;
        }
        let mut f = self.b(x).0;
        for _ in 1..n {
            f = self.a(&f);
        }
        self.c(&f)
    }
}

/// Residuals of the realization identity.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationCheck {
    /// `(probe index, degree n, max-abs coefficient residual)`.
    pub residuals: Vec<(usize, usize, f64)>,
    pub max_residual: f64,
    pub loss: TruncationLoss,
}

/// Probe functions `1, z_1, z_2, z_1 z_2` restricted to the policy.
pub fn default_realization_probes(policy: TruncationPolicy) -> Vec<ChaosExpansion> {
    let candidates = [
        MultiIndex::zero(),
        MultiIndex::unit(1),
        MultiIndex::unit(2),
        MultiIndex::from_dense(&[1, 1]),
    ];
    candidates
        .into_iter()
        .filter(|a| policy.admits(a))
        .map(|a| ChaosExpansion::monomial(policy, a, 1.0).expect("admitted"))
        .collect()
}

/// Compares `D x` and `C A^{n−1} B x` with `s_n ◊ x` for `0 ≤ n ≤ n_deg`.
pub fn realization_residuals(
    s: &TransferFunction,
    policy: TruncationPolicy,
    n_deg: usize,
    probes: &[ChaosExpansion],
) -> Result<RealizationCheck> {
    let r = Realization::new(s, policy)?;
    let mut residuals = Vec::new();
    let mut loss = TruncationLoss::default();
    for (i, x) in probes.iter().enumerate() {
        let x = x.with_policy(policy)?;
        for n in 0..=n_deg {
            let got = r.coefficient(n, &x);
            let (expect, l) = r.product(&s.coeff(n as i64), &x);
            loss = loss.merge(l);
            residuals.push((i, n, got.max_abs_diff(&expect)));
        }
    }
    let max_residual = residuals.iter().map(|t| t.2).fold(0.0, f64::max);
    Ok(RealizationCheck {
        residuals,
        max_residual,
        loss,
    })
}

/// True iff every realization residual up to degree `n_deg` is at most `tol`
/// on the default probes.
pub fn realization_verify(
    s: &TransferFunction,
    policy: TruncationPolicy,
    n_deg: usize,
    tol: f64,
) -> Result<bool> {
    let probes = default_realization_probes(policy);
    Ok(realization_residuals(s, policy, n_deg, &probes)?.max_residual <= tol)
}
