use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Rayleigh-quotient tolerance of the power iteration.
pub const POWER_TOLERANCE: f64 = 1e-10;
/// Iteration cap of the power iteration.
pub const POWER_MAX_ITERATIONS: usize = 10_000;
/// Largest dimension handled by dense SVD under [`NormMethod::Auto`].
pub const DENSE_SVD_MAX_DIM: usize = 512;

const START_SEED: u64 = 0x5e_ed0f_7075;

/// A finite linear map with access to its adjoint.
pub trait LinearMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64>;
    fn apply_adjoint(&self, y: &DVector<Complex64>) -> DVector<Complex64>;
    fn to_dense(&self) -> DMatrix<Complex64>;
    fn frobenius_norm(&self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NormMethod {
    /// Dense SVD up to [`DENSE_SVD_MAX_DIM`], power iteration above.
    #[default]
    Auto,
    PowerIteration,
    DenseSvd,
}

/// Largest singular value with its singular vectors.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub value: f64,
    /// Rigorous-up-to-rounding bracket of the truncated norm.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub method: NormMethod,
    /// Unit input direction attaining `value` (right singular vector).
    pub input: DVector<Complex64>,
    /// Unit output direction (left singular vector).
    pub output: DVector<Complex64>,
}

/// `σ_max` of a finite map.
pub fn operator_norm(map: &dyn LinearMap, method: NormMethod, tol: f64) -> Result<NormEstimate> {
    match method {
        NormMethod::DenseSvd => Ok(dense_svd_norm(map)),
        NormMethod::PowerIteration => power_iteration_norm(map, tol, POWER_MAX_ITERATIONS),
        NormMethod::Auto => {
            if map.dim_in().max(map.dim_out()) <= DENSE_SVD_MAX_DIM {
                Ok(dense_svd_norm(map))
            } else {
                power_iteration_norm(map, tol, POWER_MAX_ITERATIONS)
            }
        }
    }
}

fn zero_estimate(map: &dyn LinearMap, method: NormMethod, iterations: usize) -> NormEstimate {
    let mut input = DVector::zeros(map.dim_in());
    let mut output = DVector::zeros(map.dim_out());
    if map.dim_in() > 0 {
        input[0] = Complex64::new(1.0, 0.0);
    }
    if map.dim_out() > 0 {
        output[0] = Complex64::new(1.0, 0.0);
    }
    NormEstimate {
        value: 0.0,
        lower: 0.0,
        upper: 0.0,
        iterations,
        method,
        input,
        output,
    }
}

pub fn dense_svd_norm(map: &dyn LinearMap) -> NormEstimate {
    if map.dim_in() == 0 || map.dim_out() == 0 {
        return zero_estimate(map, NormMethod::DenseSvd, 0);
    }
    let m = map.to_dense();
    let svd = m.svd(true, true);
    let (idx, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    if sigma == 0.0 {
        return zero_estimate(map, NormMethod::DenseSvd, 0);
    }
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^*");
    let output = u.column(idx).into_owned();
    let input = v_t.row(idx).adjoint();
    NormEstimate {
        value: sigma,
        lower: sigma,
        upper: sigma,
        iterations: 0,
        method: NormMethod::DenseSvd,
        input,
        output,
    }
}

/// Power iteration on `M^*M` from a fixed pseudo-random start vector,
/// stopping once the Rayleigh quotient moves by less than `tol` (relative).
pub fn power_iteration_norm(
    map: &dyn LinearMap,
    tol: f64,
    max_iterations: usize,
) -> Result<NormEstimate> {
    let n = map.dim_in();
    if n == 0 || map.dim_out() == 0 {
        return Ok(zero_estimate(map, NormMethod::PowerIteration, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    x /= Complex64::new(x.norm(), 0.0);
    let mut rayleigh = 0.0;
    for it in 1..=max_iterations {
        let y = map.apply(&x);
        let next = y.norm_squared();
        let z = map.apply_adjoint(&y);
        let zn = z.norm();
        if zn == 0.0 {
            return Ok(zero_estimate(map, NormMethod::PowerIteration, it));
        }
        let converged = (next - rayleigh).abs() <= tol * next;
        rayleigh = next;
        if converged {
            let value = rayleigh.sqrt();
            let output = &y / Complex64::new(y.norm(), 0.0);
            return Ok(NormEstimate {
                value,
                lower: value,
                upper: map.frobenius_norm(),
                iterations: it,
                method: NormMethod::PowerIteration,
                input: x,
                output,
            });
        }
        x = z / Complex64::new(zn, 0.0);
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        lower: rayleigh.sqrt(),
        upper: map.frobenius_norm(),
    })
}

impl LinearMap for DMatrix<Complex64> {
    fn dim_in(&self) -> usize {
        self.ncols()
    }

    fn dim_out(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self * x
    }

    fn apply_adjoint(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        self.ad_mul(y)
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        self.clone()
    }

    fn frobenius_norm(&self) -> f64 {
        self.norm()
    }
}
