use num_complex::Complex64;
use rayon::prelude::*;

use crate::chaos::{ChaosExpansion, TruncationLoss};
use crate::error::{Error, Result};
use crate::operators::BasisEnumeration;

use super::grid::{same_step, GridSignal};

/// Output of a grid convolution with the number of dropped Wick products.
#[derive(Clone, Debug, PartialEq)]
pub struct GridConvolution {
    pub output: GridSignal,
    pub loss: TruncationLoss,
}

fn check_grids(h: &GridSignal, u: &GridSignal) -> Result<()> {
    if !same_step(h.dt(), u.dt()) {
        return Err(Error::GridMismatch(format!("time steps {} and {} differ", h.dt(), u.dt())));
    }
    if h.policy() != u.policy() {
        return Err(Error::PolicyMismatch {
            expected_var: h.policy().max_var,
            expected_degree: h.policy().max_degree,
            found_var: u.policy().max_var,
            found_degree: u.policy().max_degree,
        });
    }
    Ok(())
}

/// Quadrature weights over the overlap `j ∈ [lo, hi]` of output sample `i`.
///
/// Trapezoidal on windows of two or more points. A one-point window has
/// weight 1 when either signal is a single sample (a point mass) and weight 0
/// otherwise (an integral over an interval of length zero).
fn window(i: usize, nh: usize, nu: usize) -> (usize, usize, impl Fn(usize) -> f64) {
    let lo = i.saturating_sub(nu - 1);
    let hi = i.min(nh - 1);
    let point_mass = nh == 1 || nu == 1;
    let weight = move |j: usize| {
        if lo == hi {
            if point_mass {
                1.0
            } else {
                0.0
            }
        } else if j == lo || j == hi {
            0.5
        } else {
            1.0
        }
    };
    (lo, hi, weight)
}

fn output_grid(h: &GridSignal, u: &GridSignal) -> (f64, usize) {
    (h.t0() + u.t0(), h.len() + u.len() - 1)
}

/// Sparse coordinates of each sample against a basis enumeration.
fn coordinates(signal: &GridSignal, basis: &BasisEnumeration) -> Vec<Vec<(usize, Complex64)>> {
    signal
        .samples()
        .iter()
        .map(|f| {
            f.terms()
                .map(|(alpha, c)| (basis.index_of(alpha).expect("sample fits the policy"), *c))
                .collect()
        })
        .collect()
}

/// `y(t_i) = dt Σ_j w_j h(s_j) ◊ u(t_i − s_j)` on the grid starting at
/// `t0_h + t0_u`.
pub fn wick_convolve_grid(h: &GridSignal, u: &GridSignal) -> Result<GridConvolution> {
    check_grids(h, u)?;
    let policy = h.policy();
    if h.is_empty() || u.is_empty() {
        return Ok(GridConvolution {
            output: GridSignal::new(h.t0() + u.t0(), h.dt(), policy, Vec::new())?,
            loss: TruncationLoss::default(),
        });
    }
    let (t0, n) = output_grid(h, u);
    let dt = h.dt();
    let basis = BasisEnumeration::new(policy);
    // sums[a][b] = position of α_a + α_b, if it fits the policy
    let sums: Vec<Vec<Option<usize>>> = basis
        .indices()
        .iter()
        .map(|a| basis.indices().iter().map(|b| basis.index_of(&a.add(b))).collect())
        .collect();
    let (hc, uc) = (coordinates(h, &basis), coordinates(u, &basis));
    let rows: Vec<(ChaosExpansion, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (lo, hi, w) = window(i, h.len(), u.len());
            let mut acc = vec![Complex64::new(0.0, 0.0); basis.len()];
            let mut dropped = 0;
            for j in lo..=hi {
                let wj = w(j);
                if wj == 0.0 {
                    continue;
                }
                for &(a, ca) in &hc[j] {
                    let ca = ca * (dt * wj);
                    for &(b, cb) in &uc[i - j] {
                        match sums[a][b] {
                            Some(c) => acc[c] += ca * cb,
                            None => dropped += 1,
                        }
                    }
                }
            }
            let terms = basis.indices().iter().cloned().zip(acc);
            let y = ChaosExpansion::from_terms(policy, terms).expect("basis indices fit the policy");
            (y, dropped)
        })
        .collect();
    let mut loss = TruncationLoss::default();
    let mut samples = Vec::with_capacity(n);
    for (y, dropped) in rows {
        loss.dropped_terms += dropped;
        samples.push(y);
    }
    Ok(GridConvolution {
        output: GridSignal::new(t0, dt, policy, samples)?,
        loss,
    })
}

/// Per-coefficient quadrature `y_α(t_i) = dt Σ_j w_j Σ_{β≤α} h_β(s_j) u_{α−β}(t_i − s_j)`
/// on the same grid and weights as [`wick_convolve_grid`], without the Wick
/// product.
pub fn grid_convolution_oracle(h: &GridSignal, u: &GridSignal) -> Result<GridSignal> {
    check_grids(h, u)?;
    let policy = h.policy();
    if h.is_empty() || u.is_empty() {
        return GridSignal::new(h.t0() + u.t0(), h.dt(), policy, Vec::new());
    }
    let (t0, n) = output_grid(h, u);
    let dt = h.dt();
    let basis = policy.basis();
    let samples = (0..n)
        .map(|i| {
            let (lo, hi, w) = window(i, h.len(), u.len());
            let terms = basis.iter().map(|alpha| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in lo..=hi {
                    let hj = &h.samples()[j];
                    let um = &u.samples()[i - j];
                    let mut inner = Complex64::new(0.0, 0.0);
                    for beta in alpha.sub_indices() {
                        let gamma = alpha.checked_sub(&beta).expect("β ≤ α");
                        inner += hj.coeff(&beta) * um.coeff(&gamma);
                    }
                    acc += inner * (dt * w(j));
                }
                (alpha.clone(), acc)
            });
            ChaosExpansion::from_terms(policy, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    GridSignal::new(t0, dt, policy, samples)
}
