use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::LinearMap;
use crate::chaos::{order_gap, vage_bracket, ChaosExpansion, MultiIndex, TruncationPolicy, WeightOrder};
use crate::error::{Error, Result};

/// Matrices with more rows than this are kept as coordinate lists.
pub const DENSE_STORAGE_MAX_DIM: usize = 4096;

/// Graded enumeration of a policy slice: position 0 is `α = 0` and degrees
/// never decrease along the list.
#[derive(Clone, Debug)]
pub struct BasisEnumeration {
    policy: TruncationPolicy,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl BasisEnumeration {
    pub fn new(policy: TruncationPolicy) -> Self {
        let indices = policy.basis();
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Self {
            policy,
            indices,
            position,
        }
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Coordinates `ũ_α = u_α (2N)^{−kα/2}` of `u` in the weighted basis.
    pub fn to_weighted(&self, u: &ChaosExpansion, k: WeightOrder) -> Result<DVector<Complex64>> {
        let half = -0.5 * k.as_f64();
        let mut x = DVector::zeros(self.len());
        for (alpha, c) in u.terms() {
            let i = self.index_of(alpha).ok_or_else(|| Error::PolicyViolation {
                alpha: alpha.to_string(),
                max_var: self.policy.max_var,
                max_degree: self.policy.max_degree,
            })?;
            x[i] = c * alpha.weight(half)?;
        }
        Ok(x)
    }

    /// Inverse of [`Self::to_weighted`].
    pub fn from_weighted(&self, x: &DVector<Complex64>, k: WeightOrder) -> Result<ChaosExpansion> {
        let half = 0.5 * k.as_f64();
        let mut terms = Vec::with_capacity(self.len());
        for (i, alpha) in self.indices.iter().enumerate() {
            if x[i] != Complex64::new(0.0, 0.0) {
                terms.push((alpha.clone(), x[i] * alpha.weight(half)?));
            }
        }
        ChaosExpansion::from_terms(self.policy, terms)
    }
}

#[derive(Clone, Debug)]
enum Storage {
    Dense(DMatrix<Complex64>),
    /// (row, column, value) triples.
    Sparse(Vec<(usize, usize, Complex64)>),
}

/// Matrix of `T_h` on a policy slice, in the weighted orthonormal basis.
///
/// `entries[γ][β] = h_{γ−β} (2N)^{−k(γ−β)/2}` when `β ≤ γ`, else 0. The matrix
/// is lower triangular with respect to the grading.
#[derive(Clone, Debug)]
pub struct MultiplierMatrix {
    k: WeightOrder,
    basis: Arc<BasisEnumeration>,
    storage: Storage,
}

/// Assembles `T_h` on the slice of `policy`.
pub fn assemble(h: &ChaosExpansion, k: WeightOrder, policy: TruncationPolicy) -> Result<MultiplierMatrix> {
    MultiplierMatrix::with_basis(h, k, Arc::new(BasisEnumeration::new(policy)))
}

impl MultiplierMatrix {
    /// Assembles against a shared basis enumeration.
    pub fn with_basis(h: &ChaosExpansion, k: WeightOrder, basis: Arc<BasisEnumeration>) -> Result<Self> {
        let policy = basis.policy();
        let mut factors = Vec::with_capacity(h.len());
        for (delta, c) in h.terms() {
            if !policy.admits(delta) {
                return Err(Error::PolicyMismatch {
                    expected_var: policy.max_var,
                    expected_degree: policy.max_degree,
                    found_var: h.policy().max_var,
                    found_degree: h.policy().max_degree,
                });
            }
            factors.push((delta.clone(), c * delta.weight(-0.5 * k.as_f64())?));
        }
        let b = basis.len();
        let mut triples = Vec::with_capacity(factors.len() * b);
        for (col, beta) in basis.indices().iter().enumerate() {
            for (delta, v) in &factors {
                if let Some(row) = basis.index_of(&beta.add(delta)) {
                    triples.push((row, col, *v));
                }
            }
        }
        let storage = if b <= DENSE_STORAGE_MAX_DIM {
            let mut m = DMatrix::zeros(b, b);
            for (r, c, v) in triples {
                m[(r, c)] += v;
            }
            Storage::Dense(m)
        } else {
            Storage::Sparse(triples)
        };
        Ok(Self { k, basis, storage })
    }

    pub fn k(&self) -> WeightOrder {
        self.k
    }

    pub fn basis(&self) -> &Arc<BasisEnumeration> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Sparse(t) => t
                .iter()
                .filter(|(r, c, _)| *r == row && *c == col)
                .map(|(_, _, v)| *v)
                .sum(),
        }
    }

    /// `T_h u` computed in the weighted basis and mapped back to coefficients.
    pub fn apply_expansion(&self, u: &ChaosExpansion) -> Result<ChaosExpansion> {
        let u = u.with_policy(self.basis.policy())?;
        let x = self.basis.to_weighted(&u, self.k)?;
        self.basis.from_weighted(&self.apply(&x), self.k)
    }

    /// Writes the matrix as text: a header line, then either dense rows of
    /// `re im` pairs or `row col re im` coordinate lines.
    pub fn write_dump<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let p = self.basis.policy();
        let format = if self.is_sparse() { "coo" } else { "dense" };
        writeln!(
            out,
            "# B={} k={} J={} D={} format={}",
            self.dim(),
            self.k.get(),
            p.max_var,
            p.max_degree,
            format
        )?;
        match &self.storage {
            Storage::Dense(m) => {
                for r in 0..m.nrows() {
                    let row: Vec<String> = (0..m.ncols())
                        .map(|c| format!("{:e} {:e}", m[(r, c)].re, m[(r, c)].im))
                        .collect();
                    writeln!(out, "{}", row.join(" "))?;
                }
            }
            Storage::Sparse(t) => {
                for (r, c, v) in t {
                    writeln!(out, "{r} {c} {:e} {:e}", v.re, v.im)?;
                }
            }
        }
        Ok(())
    }
}

impl LinearMap for MultiplierMatrix {
    fn dim_in(&self) -> usize {
        self.dim()
    }

    fn dim_out(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(t) => {
                let mut y = DVector::zeros(self.dim());
                for &(r, c, v) in t {
                    y[r] += v * x[c];
                }
                y
            }
        }
    }

    fn apply_adjoint(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.storage {
            Storage::Dense(m) => m.ad_mul(y),
            Storage::Sparse(t) => {
                let mut x = DVector::zeros(self.dim());
                for &(r, c, v) in t {
                    x[c] += v.conj() * y[r];
                }
                x
            }
        }
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(t) => {
                let mut m = DMatrix::zeros(self.dim(), self.dim());
                for &(r, c, v) in t {
                    m[(r, c)] += v;
                }
                m
            }
        }
    }

    fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.norm(),
            Storage::Sparse(t) => t.iter().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt(),
        }
    }
}

/// `T_h^* v` in `ℋ_k`: `(T_h^* v)_β = Σ_δ h̄_δ v_{β+δ} (2N)^{−kδ}`.
///
/// Exact on the full space: every `β` produced has degree at most that of
/// `v`, so the result stays on `v`'s policy.
pub fn adjoint_apply(h: &ChaosExpansion, v: &ChaosExpansion, k: WeightOrder) -> ChaosExpansion {
    let q = -k.as_f64();
    let mut terms = Vec::with_capacity(h.len() * v.len());
    for (gamma, vg) in v.terms() {
        for (delta, hd) in h.terms() {
            if let Some(beta) = gamma.checked_sub(delta) {
                terms.push((beta, hd.conj() * vg * delta.weight_unchecked(q)));
            }
        }
    }
    ChaosExpansion::from_terms(v.policy(), terms).expect("sub-indices of v stay in its policy")
}

/// Våge bound `‖T_h‖_{op,l,k} ≤ A(k − l) ‖h‖_l`.
///
/// Uses the upper end of the enclosure of `A(k − l)`, so the bound holds
/// rigorously up to rounding.
pub fn vage_upper_bound(h: &ChaosExpansion, k: WeightOrder, l: WeightOrder, tol: f64) -> Result<f64> {
    let gap = order_gap(k, l)?;
    let a = vage_bracket(f64::from(gap), tol)?.upper;
    Ok(a * h.norm_k(l))
}

/// Triangle bound `‖T_h‖ ≤ Σ_δ |h_δ| (2N)^{−kδ/2}`.
///
/// `T_{H_δ}` maps `e_β` to `(2N)^{−kδ/2} e_{β+δ}`, a scaled isometry, so each
/// term is the exact norm of one monomial multiplier. Exact for deterministic
/// `h`.
pub fn multiplier_norm_bound(h: &ChaosExpansion, k: WeightOrder) -> f64 {
    let q = -0.5 * k.as_f64();
    h.terms()
        .map(|(delta, c)| c.norm() * delta.weight_unchecked(q))
        .sum()
}
