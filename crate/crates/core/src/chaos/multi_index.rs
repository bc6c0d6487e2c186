//! Finitely supported exponent sequences.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A multi-index `α = (α_1, α_2, ...)` with finitely many non-zero entries.
///
/// Stored sparsely as strictly increasing `(variable, exponent)` pairs with
/// variables counted from 1 and exponents strictly positive. The empty
/// sequence is `α = 0`.
///
/// Ordering is graded: total degree first, then the dense exponent vectors in
/// descending lexicographic order: `0 < e_1 < e_2 < 2e_1 < e_1 + e_2 < 2e_2`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    exps: Vec<(u32, u32)>,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit index `e_j`.
    pub fn unit(var: u32) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Self {
            exps: vec![(var, 1)],
        }
    }

    /// `exponent · e_var`.
    pub fn power(var: u32, exponent: u32) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        if exponent == 0 {
            return Self::zero();
        }
        Self {
            exps: vec![(var, exponent)],
        }
    }

    /// Builds an index from `(variable, exponent)` pairs, validating the
    /// canonical form.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self> {
        let mut prev = 0u32;
        for &(var, exp) in pairs {
            if var == 0 {
                return Err(Error::Malformed("variable index 0 in multi-index".into()));
            }
            if var <= prev {
                return Err(Error::Malformed(format!(
                    "multi-index variables must be strictly increasing, got {var} after {prev}"
                )));
            }
            if exp == 0 {
                return Err(Error::Malformed(format!(
                    "zero exponent stored for variable {var}"
                )));
            }
            prev = var;
        }
        Ok(Self {
            exps: pairs.to_vec(),
        })
    }

    /// Builds an index from a dense exponent vector; entry 0 is variable 1.
    pub fn from_dense(exponents: &[u32]) -> Self {
        let exps = exponents
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| (i as u32 + 1, a))
            .collect();
        Self { exps }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, a)| a).sum()
    }

    /// Largest variable carrying a non-zero exponent, 0 for `α = 0`.
    pub fn max_var(&self) -> u32 {
        self.exps.last().map_or(0, |&(j, _)| j)
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.exps
            .binary_search_by_key(&var, |&(j, _)| j)
            .map_or(0, |i| self.exps[i].1)
    }

    /// Dense exponent vector of length `len` (variables beyond `len` dropped).
    pub fn to_dense(&self, len: usize) -> Vec<u32> {
        let mut out = vec![0; len];
        for &(j, a) in &self.exps {
            if (j as usize) <= len {
                out[j as usize - 1] = a;
            }
        }
        out
    }

    /// `α + β`.
    pub fn add(&self, other: &Self) -> Self {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut k) = (0, 0);
        while i < self.exps.len() && k < other.exps.len() {
            let (ja, a) = self.exps[i];
            let (jb, b) = other.exps[k];
            match ja.cmp(&jb) {
                Ordering::Less => {
                    exps.push((ja, a));
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push((jb, b));
                    k += 1;
                }
                Ordering::Equal => {
                    exps.push((ja, a + b));
                    i += 1;
                    k += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[k..]);
        Self { exps }
    }

    /// `α − β` when `β ≤ α` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut k = 0;
        for &(j, a) in &self.exps {
            let b = if k < other.exps.len() && other.exps[k].0 == j {
                k += 1;
                other.exps[k - 1].1
            } else if k < other.exps.len() && other.exps[k].0 < j {
                return None;
            } else {
                0
            };
            match a.cmp(&b) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => exps.push((j, a - b)),
            }
        }
        if k < other.exps.len() {
            return None;
        }
        Some(Self { exps })
    }

    /// Componentwise `self ≤ other`.
    pub fn is_below(&self, other: &Self) -> bool {
        other.checked_sub(self).is_some()
    }

    /// Every `β` with `β ≤ α` componentwise, including `0` and `α` itself.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero()];
        for &(j, a) in &self.exps {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for base in &out {
                for e in 0..=a {
                    let mut exps = base.exps.clone();
                    if e > 0 {
                        exps.push((j, e));
                    }
                    next.push(MultiIndex { exps });
                }
            }
            out = next;
        }
        out
    }

    /// `α! = ∏ α_j!`.
    pub fn factorial(&self) -> f64 {
        self.exps
            .iter()
            .map(|&(_, a)| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// `(2N)^{qα} = ∏ (2j)^{q·α_j}`; 1 for `α = 0`.
    pub fn weight(&self, q: f64) -> Result<f64> {
        let w = self.weight_unchecked(q);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::WeightOverflow {
                alpha: self.to_string(),
                q,
            })
        }
    }

    pub(crate) fn weight_unchecked(&self, q: f64) -> f64 {
        self.exps
            .iter()
            .map(|&(j, a)| (2.0 * f64::from(j)).powf(q * f64::from(a)))
            .product()
    }

    /// The monomial `z^α`, with coordinates missing from `z` read as zero.
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &(j, a) in &self.exps {
            match z.get(j as usize - 1) {
                Some(zj) => acc *= zj.powu(a),
                None => return Complex64::new(0.0, 0.0),
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut k) = (0, 0);
        loop {
            let a = self.exps.get(i);
            let b = other.exps.get(k);
            let (ea, eb) = match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => {
                    i += 1;
                    (ea, 0)
                }
                (None, Some(&(_, eb))) => {
                    k += 1;
                    (0, eb)
                }
                (Some(&(ja, ea)), Some(&(jb, eb))) => match ja.cmp(&jb) {
                    Ordering::Less => {
                        i += 1;
                        (ea, 0)
                    }
                    Ordering::Greater => {
                        k += 1;
                        (0, eb)
                    }
                    Ordering::Equal => {
                        i += 1;
                        k += 1;
                        (ea, eb)
                    }
                },
            };
            // a larger exponent on an earlier variable sorts first
            match eb.cmp(&ea) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("0");
        }
        for (n, &(j, a)) in self.exps.iter().enumerate() {
            if n > 0 {
                f.write_str("+")?;
            }
            if a == 1 {
                write!(f, "e{j}")?;
            } else {
                write!(f, "{a}e{j}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiIndex({self})")
    }
}
