use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::chaos::{EvaluationPoint, WeightOrder};
use crate::error::{Error, Result};

use super::transfer::TransferFunction;

/// Time-variable factor of the Schur kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelDomain {
    /// `1 / (1 − ζ ν̄)` on the unit disk.
    #[default]
    Disk,
    /// `1 / (−i(λ − ν̄))` on the upper half-plane.
    HalfPlane,
}

impl KernelDomain {
    fn admits(self, zeta: Complex64) -> bool {
        match self {
            KernelDomain::Disk => zeta.norm() < 1.0,
            KernelDomain::HalfPlane => zeta.im > 0.0,
        }
    }

    fn denominator(self, a: Complex64, b: Complex64) -> Complex64 {
        match self {
            KernelDomain::Disk => Complex64::new(1.0, 0.0) - a * b.conj(),
            KernelDomain::HalfPlane => Complex64::new(0.0, -1.0) * (a - b.conj()),
        }
    }
}

/// Spectral summary of a Hermitian Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramSummary {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
    pub size: usize,
}

impl GramSummary {
    /// `λ_min ≥ −rel_tol · trace`.
    pub fn is_positive(&self, rel_tol: f64) -> bool {
        self.min_eigenvalue >= -rel_tol * self.trace.abs()
    }
}

/// `K_k(z, w) = ∏_j (1 − z_j w̄_j (2j)^k)^{−1}` over the coordinates present.
fn full_kernel(z: &EvaluationPoint, w: &EvaluationPoint, k: WeightOrder) -> Complex64 {
    let n = z.coords().len().max(w.coords().len());
    (1..=n as u32)
        .map(|j| {
            let r = z.coord(j) * w.coord(j).conj() * (2.0 * f64::from(j)).powf(k.as_f64());
            Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - r)
        })
        .product()
}

/// Smallest eigenvalue (with trace) of the Gram matrix
/// `G_ij = (1 − ℋ(ζ_i, z_i) ℋ(ζ_j, z_j)̄) K_k(z_i, z_j) / (1 − ζ_i ζ̄_j)`.
///
/// A Schur multiplier gives a positive semi-definite `G` on every finite
/// point set, so a clearly negative eigenvalue refutes the property.
pub fn schur_kernel_gram(
    h: &TransferFunction,
    points: &[(Complex64, EvaluationPoint)],
    k: WeightOrder,
) -> Result<GramSummary> {
    schur_kernel_gram_with(|zeta, z| h.eval(zeta, z), points, k, KernelDomain::Disk)
}

/// [`schur_kernel_gram`] for an arbitrary symbol and time domain.
pub fn schur_kernel_gram_with<F>(
    symbol: F,
    points: &[(Complex64, EvaluationPoint)],
    k: WeightOrder,
    domain: KernelDomain,
) -> Result<GramSummary>
where
    F: Fn(Complex64, &EvaluationPoint) -> Complex64 + Sync,
{
    for (i, (zeta, z)) in points.iter().enumerate() {
        if !domain.admits(*zeta) || !zeta.is_finite() {
            return Err(Error::InadmissiblePoint(format!("time variable {zeta} at point {i}")));
        }
        let ratio = z.geometric_ratio(k);
        if !(ratio < 1.0) {
            return Err(Error::InadmissiblePoint(format!(
                "point {i} has |z_j|²(2j)^k = {ratio} outside the kernel domain"
            )));
        }
    }
    let n = points.len();
    let values: Vec<Complex64> = points.par_iter().map(|(zeta, z)| symbol(*zeta, z)).collect();
    let mut g = DMatrix::from_fn(n, n, |i, j| {
        let (zi, pi) = &points[i];
        let (zj, pj) = &points[j];
        (Complex64::new(1.0, 0.0) - values[i] * values[j].conj()) * full_kernel(pi, pj, k)
            / domain.denominator(*zi, *zj)
    });
    g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = (0..n).map(|i| g[(i, i)].re).sum();
    if n == 0 {
        return Ok(GramSummary {
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
            trace: 0.0,
            size: 0,
        });
    }
    let eig = g.symmetric_eigenvalues();
    Ok(GramSummary {
        min_eigenvalue: eig.min(),
        max_eigenvalue: eig.max(),
        trace,
        size: n,
    })
}

/// Random points with `|ζ| ≤ zeta_radius` (disk) or `ζ` in
/// `[−1, 1] + i[0.1, 1]` (half-plane), and `z ∈ ℂ^J` with
/// `|z_j|² (2j)^k ≤ z_ratio`.
pub fn random_points<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    k: WeightOrder,
    max_var: u32,
    domain: KernelDomain,
    zeta_radius: f64,
    z_ratio: f64,
) -> Vec<(Complex64, EvaluationPoint)> {
    (0..count)
        .map(|_| {
            let zeta = match domain {
                KernelDomain::Disk => {
                    Complex64::from_polar(zeta_radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
                }
                KernelDomain::HalfPlane => {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0))
                }
            };
            let z = (1..=max_var)
                .map(|j| {
                    let r = (z_ratio / (2.0 * f64::from(j)).powf(k.as_f64())).sqrt();
                    Complex64::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            (zeta, EvaluationPoint::new(z))
        })
        .collect()
}
