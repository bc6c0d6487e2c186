//! The constant `A(q) = Σ_α (2N)^{−qα}` of Våge's inequality.
//!
//! The sum factorizes over variables, `A(q) = ∏_{j≥1} (1 − (2j)^{−q})^{−1}`,
//! so it is computed as a partial product over `j ≤ J₀` times a bracketed
//! tail. With `x_j = (2j)^{−q}` the log-tail `T = −Σ_{j>J₀} ln(1 − x_j)` obeys
//!
//! ```text
//! Σ x_j + ½ Σ x_j²  ≤  T  ≤  Σ x_j + Σ x_j² / (2(1 − x_{J₀+1}))
//! ```
//!
//! and the power sums of the convex decreasing `t ↦ (2t)^{−p}` are bracketed
//! by the trapezoid and midpoint rules.

use crate::error::{Error, Result};

/// Two-sided enclosure of `A(q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VageBracket {
    pub lower: f64,
    pub upper: f64,
    /// Number of explicit factors in the partial product.
    pub factors: usize,
}

impl VageBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

const MAX_FACTORS: usize = 1 << 28;

/// `∏_{j=1}^{n} (1 − (2j)^{−q})^{−1}`, a lower bound for `A(q)` that
/// increases with `n`.
pub fn vage_partial_product(q: f64, factors: usize) -> f64 {
    log_partial(q, 0, factors).exp()
}

fn log_partial(q: f64, from: usize, to: usize) -> f64 {
    ((from + 1)..=to)
        .map(|j| -(-(2.0 * j as f64).powf(-q)).ln_1p())
        .sum()
}

// ∫_a^∞ (2t)^{−p} dt
fn tail_integral(p: f64, a: f64) -> f64 {
    (2.0 * a).powf(1.0 - p) / (2.0 * (p - 1.0))
}

// Bracket of Σ_{j>n} (2j)^{−p} for p > 1.
fn power_tail(p: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let lower = tail_integral(p, n + 1.0) + 0.5 * (2.0 * (n + 1.0)).powf(-p);
    let upper = tail_integral(p, n + 0.5);
    (lower, upper)
}

/// Encloses `A(q)` in an interval of width at most `tol`.
pub fn vage_bracket(q: f64, tol: f64) -> Result<VageBracket> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::VageDivergence(q));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut n = 16usize;
    let mut log_p = log_partial(q, 0, n);
    loop {
        let (s1_lo, s1_hi) = power_tail(q, n);
        let (s2_lo, s2_hi) = power_tail(2.0 * q, n);
        let x_next = (2.0 * (n + 1) as f64).powf(-q);
        let t_lo = s1_lo + 0.5 * s2_lo;
        let t_hi = s1_hi + s2_hi / (2.0 * (1.0 - x_next));
        let lower = (log_p + t_lo).exp();
        let upper = (log_p + t_hi).exp();
        // summation rounding in log_p is far below tol for the sizes used here
        if upper - lower <= tol {
            return Ok(VageBracket {
                lower,
                upper,
                factors: n,
            });
        }
        if n >= MAX_FACTORS {
            return Err(Error::InvalidArgument(format!(
                "A({q}) cannot be enclosed to {tol} with {n} factors"
            )));
        }
        log_p += log_partial(q, n, 2 * n);
        n *= 2;
    }
}

/// `A(q)` within absolute tolerance `tol` (the midpoint of [`vage_bracket`]).
pub fn vage_constant(q: f64, tol: f64) -> Result<f64> {
    vage_bracket(q, 2.0 * tol).map(|b| b.midpoint())
}
