use num_complex::Complex64;

use crate::chaos::{ChaosExpansion, EvaluationPoint};
use crate::error::Result;

use super::convolve::wick_convolve_grid;
use super::grid::{trapezoid_weights, GridSignal};

/// Coefficientwise trapezoidal Laplace transform `∫ e^{−ξt} f(t) dt`.
///
/// `ξ = iω` gives the Fourier transform.
pub fn laplace_transform(f: &GridSignal, xi: Complex64) -> ChaosExpansion {
    let w = trapezoid_weights(f.len());
    let mut acc = ChaosExpansion::zero(f.policy());
    for (i, s) in f.samples().iter().enumerate() {
        let factor = (-xi * f.time(i)).exp() * (f.dt() * w[i]);
        acc = acc.axpy(factor, s);
    }
    acc
}

/// `max |ŷ(ξ, z) − ĥ(ξ, z) û(ξ, z)|` over the given frequencies and points,
/// where `y` is the grid convolution of `h` and `u` and every transform is the
/// Hermite transform of the quadrature Laplace transform.
pub fn cont_transfer_check(
    h: &GridSignal,
    u: &GridSignal,
    freqs: &[Complex64],
    z_points: &[EvaluationPoint],
) -> Result<f64> {
    let y = wick_convolve_grid(h, u)?.output;
    let mut worst: f64 = 0.0;
    for &xi in freqs {
        let (hy, hh, hu) = (laplace_transform(&y, xi), laplace_transform(h, xi), laplace_transform(u, xi));
        for z in z_points {
            let c = z.coords();
            let r = (hy.hermite_transform(c) - hh.hermite_transform(c) * hu.hermite_transform(c)).norm();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{MultiIndex, TruncationPolicy};

    fn p() -> TruncationPolicy {
        TruncationPolicy::new(2, 2).unwrap()
    }

    #[test]
    fn exponential_and_box() {
        let dt = 1e-3;
        let h = GridSignal::deterministic(0.0, dt, 20_001, p(), |t| (-t).exp()).unwrap();
        let u = GridSignal::deterministic(0.0, dt, 1_001, p(), |_| 1.0).unwrap();
        let freqs: Vec<Complex64> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|w| Complex64::new(0.0, *w)).collect();
        let r = cont_transfer_check(&h, &u, &freqs, &[EvaluationPoint::origin()]).unwrap();
        assert!(r <= 1e-4, "{r}");
        // the scalar transform of e^{-t} is 1/(1+ξ)
        let xi = Complex64::new(0.0, 0.5);
        let hh = laplace_transform(&h, xi).mean();
        assert!((hh - 1.0 / (1.0 + xi)).norm() < 1e-6);
    }

    #[test]
    fn zero_input() {
        let h = GridSignal::deterministic(0.0, 0.1, 10, p(), |t| t).unwrap();
        let u = GridSignal::deterministic(0.0, 0.1, 10, p(), |_| 0.0).unwrap();
        let r = cont_transfer_check(&h, &u, &[Complex64::new(0.0, 1.0)], &[EvaluationPoint::real(&[0.1, 0.2])]).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn single_coefficient_signals() {
        let dt = 1e-3;
        let e1 = MultiIndex::unit(1);
        let h = GridSignal::from_fn(0.0, dt, 5001, p(), |t| ChaosExpansion::monomial(p(), e1.clone(), (-2.0 * t).exp()).unwrap()).unwrap();
        let u = GridSignal::from_fn(0.0, dt, 2001, p(), |t| ChaosExpansion::monomial(p(), e1.clone(), t.sin()).unwrap()).unwrap();
        let xi = Complex64::new(0.1, 0.7);
        let z = EvaluationPoint::real(&[0.3]);
        let r = cont_transfer_check(&h, &u, &[xi], &[z]).unwrap();
        assert!(r < 1e-5, "{r}");
        // per coefficient: the 2e1 coefficient of ŷ is ĥ_{e1} û_{e1}
        let y = wick_convolve_grid(&h, &u).unwrap().output;
        let lhs = laplace_transform(&y, xi).coeff(&MultiIndex::power(1, 2));
        let rhs = laplace_transform(&h, xi).coeff(&e1) * laplace_transform(&u, xi).coeff(&e1);
        assert!((lhs - rhs).norm() < 1e-5);
    }
}
