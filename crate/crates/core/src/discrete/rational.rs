//! Rational multipliers `ℋ(ζ, z) = D(ζ) + C(ζ)(I_N − Σ_k z_k A_k(ζ))^{−1} Σ_k z_k B_k(ζ)`
//! and their chaos expansion at fixed `ζ`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chaos::{ChaosExpansion, EvaluationPoint, MultiIndex, TruncationPolicy};
use crate::error::{Error, Result};

/// A matrix polynomial `Σ_i ζ^i P_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    coeffs: Vec<DMatrix<Complex64>>,
    rows: usize,
    cols: usize,
}

impl PolyMatrix {
    /// Coefficients by increasing power; all must share one shape.
    pub fn new(coeffs: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty matrix polynomial".into()))?;
        let (rows, cols) = first.shape();
        if coeffs.iter().any(|c| c.shape() != (rows, cols)) {
            return Err(Error::InvalidArgument("matrix polynomial coefficients differ in shape".into()));
        }
        Ok(Self { coeffs, rows, cols })
    }

    /// A polynomial of degree zero.
    pub fn constant(m: DMatrix<Complex64>) -> Self {
        let (rows, cols) = m.shape();
        Self {
            coeffs: vec![m],
            rows,
            cols,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(DMatrix::zeros(rows, cols))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn eval(&self, zeta: Complex64) -> DMatrix<Complex64> {
        let mut acc = DMatrix::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = acc * zeta + c;
        }
        acc
    }
}

/// Realization data `D, C, A_1..A_M, B_1..B_M` with state dimension `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSpec {
    d: PolyMatrix,
    c: PolyMatrix,
    a: Vec<PolyMatrix>,
    b: Vec<PolyMatrix>,
}

impl RationalSpec {
    /// Checks shapes: `D` is 1×1, `C` is 1×N, each `A_k` is N×N and each
    /// `B_k` is N×1, with as many `A`s as `B`s.
    pub fn new(d: PolyMatrix, c: PolyMatrix, a: Vec<PolyMatrix>, b: Vec<PolyMatrix>) -> Result<Self> {
        let n = c.shape().1;
        let bad = |what: &str| Err(Error::InvalidArgument(format!("rational form: {what}")));
        if d.shape() != (1, 1) {
            return bad("D must be 1×1");
        }
        if c.shape().0 != 1 || n == 0 {
            return bad("C must be 1×N with N ≥ 1");
        }
        if a.len() != b.len() {
            return bad("as many A_k as B_k are needed");
        }
        if a.iter().any(|m| m.shape() != (n, n)) {
            return bad("every A_k must be N×N");
        }
        if b.iter().any(|m| m.shape() != (n, 1)) {
            return bad("every B_k must be N×1");
        }
        Ok(Self { d, c, a, b })
    }

    pub fn state_dim(&self) -> usize {
        self.c.shape().1
    }

    /// Number of noise variables `M`.
    pub fn noise_vars(&self) -> usize {
        self.a.len()
    }

    /// Direct evaluation by a dense linear solve.
    pub fn eval_direct(&self, zeta: Complex64, z: &EvaluationPoint) -> Result<Complex64> {
        let n = self.state_dim();
        let mut lhs = DMatrix::<Complex64>::identity(n, n);
        let mut rhs = DMatrix::<Complex64>::zeros(n, 1);
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let zk = z.coord(k as u32 + 1);
            lhs -= a.eval(zeta) * zk;
            rhs += b.eval(zeta) * zk;
        }
        let x = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InadmissiblePoint("I − Σ z_k A_k is singular".into()))?;
        Ok(self.d.eval(zeta)[(0, 0)] + (self.c.eval(zeta) * x)[(0, 0)])
    }
}

/// Chaos expansion of `ℋ(ζ, ·)` with the bounds used to justify it.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalExpansion {
    pub expansion: ChaosExpansion,
    /// `q = Σ_k r_k ‖A_k(ζ)‖_F`, an upper bound for `‖Σ z_k A_k‖` on the box.
    pub contraction_bound: f64,
    /// Bound on `|ℋ(ζ, z) − I(expansion)(z)|` over the box.
    pub tail_bound: f64,
}

/// Expands the resolvent as a Neumann series in `z` up to the policy degree.
///
/// `z_radii[k]` bounds `|z_{k+1}|` on the box of interest; the series is
/// accepted only when `Σ_k r_k ‖A_k(ζ)‖_F < 1` there. The coefficient of
/// `z^α` (`|α| ≥ 1`) is `C P[α]` with `P[e_k] = B_k` and
/// `P[α + e_k] += A_k P[α]`.
pub fn rational_expand(
    spec: &RationalSpec,
    zeta: Complex64,
    policy: TruncationPolicy,
    z_radii: &[f64],
) -> Result<RationalExpansion> {
    let m = spec.noise_vars();
    if m as u32 > policy.max_var {
        return Err(Error::PolicyViolation {
            alpha: format!("e{m}"),
            max_var: policy.max_var,
            max_degree: policy.max_degree,
        });
    }
    if z_radii.len() != m || z_radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidArgument(format!("need {m} finite non-negative box radii")));
    }
    let a: Vec<_> = spec.a.iter().map(|p| p.eval(zeta)).collect();
    let b: Vec<_> = spec.b.iter().map(|p| p.eval(zeta)).collect();
    let c = spec.c.eval(zeta);
    let q: f64 = z_radii.iter().zip(&a).map(|(r, ak)| r * ak.norm()).sum();
    if q >= 1.0 {
        return Err(Error::NeumannDivergence { bound: q });
    }
    let beta: f64 = z_radii.iter().zip(&b).map(|(r, bk)| r * bk.norm()).sum();

    let mut expansion = ChaosExpansion::constant(policy, spec.d.eval(zeta)[(0, 0)]);
    let mut layer: BTreeMap<MultiIndex, DMatrix<Complex64>> = BTreeMap::new();
    if policy.max_degree >= 1 {
        for (k, bk) in b.iter().enumerate() {
            layer.insert(MultiIndex::unit(k as u32 + 1), bk.clone());
        }
    }
    for degree in 1..=policy.max_degree {
        for (alpha, p) in &layer {
            expansion.add_term(alpha.clone(), (&c * p)[(0, 0)])?;
        }
        if degree == policy.max_degree {
            break;
        }
        let mut next: BTreeMap<MultiIndex, DMatrix<Complex64>> = BTreeMap::new();
        for (alpha, p) in &layer {
            for (k, ak) in a.iter().enumerate() {
                let v = ak * p;
                let key = alpha.add(&MultiIndex::unit(k as u32 + 1));
                match next.get_mut(&key) {
                    Some(acc) => *acc += v,
                    None => {
                        next.insert(key, v);
                    }
                }
            }
        }
        layer = next;
    }
    let tail_bound = c.norm() * beta * q.powi(policy.max_degree as i32) / (1.0 - q);
    Ok(RationalExpansion {
        expansion,
        contraction_bound: q,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar(v: f64) -> PolyMatrix {
        PolyMatrix::constant(DMatrix::from_element(1, 1, c(v)))
    }

    #[test]
    fn no_feedback_is_affine() {
        let spec = RationalSpec::new(scalar(2.0), scalar(3.0), vec![scalar(0.0), scalar(0.0)], vec![scalar(1.0), scalar(-1.0)]).unwrap();
        let p = TruncationPolicy::new(2, 4).unwrap();
        let e = rational_expand(&spec, c(0.5), p, &[0.1, 0.1]).unwrap();
        let expect = ChaosExpansion::from_terms(p, [(MultiIndex::zero(), 2.0), (MultiIndex::unit(1), 3.0), (MultiIndex::unit(2), -3.0)]).unwrap();
        assert_eq!(e.expansion, expect);
        assert_eq!(e.tail_bound, 0.0);
    }

    #[test]
    fn scalar_geometric_series() {
        // D + C B z / (1 − A z): coefficient C A^{n−1} B at z^n
        let (d, cc, a, b) = (1.0, 2.0, 0.5, 3.0);
        let spec = RationalSpec::new(scalar(d), scalar(cc), vec![scalar(a)], vec![scalar(b)]).unwrap();
        let p = TruncationPolicy::new(1, 8).unwrap();
        let e = rational_expand(&spec, c(0.0), p, &[0.5]).unwrap();
        assert_eq!(e.expansion.coeff(&MultiIndex::zero()), c(d));
        for n in 1..=8u32 {
            let expect = cc * a.powi(n as i32 - 1) * b;
            assert!((e.expansion.coeff(&MultiIndex::power(1, n)) - c(expect)).norm() < 1e-15);
        }
        let z = EvaluationPoint::real(&[0.2]);
        let direct = spec.eval_direct(c(0.0), &z).unwrap();
        assert!((direct - c(d + cc * b * 0.2 / (1.0 - a * 0.2))).norm() < 1e-15);
        let err = (e.expansion.hermite_transform(z.coords()) - direct).norm();
        assert!(err <= e.tail_bound);
    }

    #[test]
    fn matrix_case_matches_linear_solve() {
        let m2 = |v: [f64; 4]| DMatrix::from_row_slice(2, 2, &v.map(c));
        let col = |v: [f64; 2]| DMatrix::from_row_slice(2, 1, &v.map(c));
        let a1 = PolyMatrix::new(vec![m2([0.2, 0.1, 0.0, 0.3]), m2([0.1, 0.0, 0.1, 0.0])]).unwrap();
        let a2 = PolyMatrix::constant(m2([0.0, -0.2, 0.1, 0.1]));
        let b1 = PolyMatrix::constant(col([1.0, 0.5]));
        let b2 = PolyMatrix::new(vec![col([0.0, 1.0]), col([0.5, 0.0])]).unwrap();
        let cm = PolyMatrix::constant(DMatrix::from_row_slice(1, 2, &[c(1.0), c(-1.0)]));
        let spec = RationalSpec::new(scalar(0.3), cm, vec![a1, a2], vec![b1, b2]).unwrap();
        let p = TruncationPolicy::new(2, 12).unwrap();
        let zeta = Complex64::new(0.4, 0.3);
        let e = rational_expand(&spec, zeta, p, &[0.1, 0.1]).unwrap();
        for z in [[0.1, 0.0], [0.05, -0.1], [-0.07, 0.08]] {
            let z = EvaluationPoint::real(&z);
            let direct = spec.eval_direct(zeta, &z).unwrap();
            let err = (e.expansion.hermite_transform(z.coords()) - direct).norm();
            assert!(err <= 1e-10 && err <= e.tail_bound + 1e-15, "{err}");
        }
    }

    #[test]
    fn divergence_and_shape_errors() {
        let spec = RationalSpec::new(scalar(0.0), scalar(1.0), vec![scalar(2.0)], vec![scalar(1.0)]).unwrap();
        let p = TruncationPolicy::new(1, 3).unwrap();
        assert!(matches!(rational_expand(&spec, c(0.0), p, &[0.6]), Err(Error::NeumannDivergence { .. })));
        assert!(RationalSpec::new(scalar(0.0), scalar(1.0), vec![scalar(2.0)], vec![]).is_err());
    }
}
