use serde::{Deserialize, Serialize};

use super::MultiIndex;
use crate::error::{Error, Result};

/// Box truncation `{α : support ⊆ {1..J}, |α| ≤ D}` bounding every finite
/// computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationPolicy {
    #[serde(rename = "J")]
    pub max_var: u32,
    #[serde(rename = "D")]
    pub max_degree: u32,
}

impl TruncationPolicy {
    pub fn new(max_var: u32, max_degree: u32) -> Result<Self> {
        if max_var == 0 {
            return Err(Error::InvalidArgument(
                "truncation policy needs at least one variable".into(),
            ));
        }
        Ok(Self {
            max_var,
            max_degree,
        })
    }

    pub fn admits(&self, alpha: &MultiIndex) -> bool {
        alpha.max_var() <= self.max_var && alpha.degree() <= self.max_degree
    }

    pub fn check(&self, alpha: &MultiIndex) -> Result<()> {
        if self.admits(alpha) {
            Ok(())
        } else {
            Err(Error::PolicyViolation {
                alpha: alpha.to_string(),
                max_var: self.max_var,
                max_degree: self.max_degree,
            })
        }
    }

    /// Pointwise maximum of two policies.
    pub fn join(&self, other: &Self) -> Self {
        Self {
            max_var: self.max_var.max(other.max_var),
            max_degree: self.max_degree.max(other.max_degree),
        }
    }

    /// Whether every index admitted by `self` is admitted by `other`.
    pub fn is_within(&self, other: &Self) -> bool {
        self.max_var <= other.max_var && self.max_degree <= other.max_degree
    }

    /// Number of admitted multi-indices, `C(J + D, D)`.
    pub fn basis_size(&self) -> usize {
        let (j, d) = (u128::from(self.max_var), u128::from(self.max_degree));
        let mut c: u128 = 1;
        for i in 1..=d {
            c = c * (j + i) / i;
        }
        c as usize
    }

    /// All admitted multi-indices in graded order (index 0 is `α = 0`).
    pub fn basis(&self) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(self.basis_size());
        let mut dense = vec![0u32; self.max_var as usize];
        for d in 0..=self.max_degree {
            compositions(&mut dense, 0, d, &mut out);
        }
        out
    }
}

// Dense vectors summing to `remaining`, earliest variable taking the largest
// exponent first.
fn compositions(dense: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == dense.len() {
        dense[pos] = remaining;
        out.push(MultiIndex::from_dense(dense));
        dense[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        dense[pos] = a;
        compositions(dense, pos + 1, remaining - a, out);
    }
    dense[pos] = 0;
}

/// Order `k ≥ 1` of the norm `‖·‖_k`, of the kernel `K_k`, or the order `l`
/// of an impulse response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct WeightOrder(u32);

impl WeightOrder {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("weight order must be >= 1".into()));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<u32> for WeightOrder {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        Self::new(k)
    }
}

impl From<WeightOrder> for u32 {
    fn from(k: WeightOrder) -> u32 {
        k.0
    }
}

/// Checks the standing assumption `k > l + 1` and returns `k − l`.
pub fn order_gap(k: WeightOrder, l: WeightOrder) -> Result<u32> {
    if k.get() > l.get() + 1 {
        Ok(k.get() - l.get())
    } else {
        Err(Error::OrderViolation {
            k: k.get(),
            l: l.get(),
        })
    }
}
