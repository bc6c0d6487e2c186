use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chaos::{order_gap, vage_bracket, ChaosExpansion, WeightOrder};
use crate::discrete::normalize_k;
use crate::error::Result;
use crate::operators::{
    adjoint_apply, assemble, multiplier_norm_bound, operator_norm,
    BasisEnumeration, NormMethod, POWER_TOLERANCE,
};
use crate::report::{Criterion, ReportParameters, StabilityReport, TimeDomain, Witness};

use super::grid::GridSignal;

/// Regularization `ε` of the BIBO witness `T^*g / (‖T^*g‖ + ε)`.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Samples whose top singular vectors join the default probe set.
const SINGULAR_PROBE_SAMPLES: usize = 8;

const QUADRATURE_NOTE: &str = "trapezoidal quadrature on the grid; error O(dt^2) for twice differentiable integrands";

fn parameters(h: &GridSignal, k: WeightOrder, l: Option<WeightOrder>, tol: f64) -> ReportParameters {
    let mut p = ReportParameters::new(k.get(), h.policy(), tol);
    p.l = l.map(WeightOrder::get);
    p.dt = Some(h.dt());
    p.n_time = Some(h.len());
    p
}

fn tail_note(r: &mut StabilityReport, tail: Option<f64>) {
    match tail {
        Some(t) => r.note(format!("tail beyond the grid support bounded by the supplied {t}")),
        None => r.note("tail beyond the grid support assumed to be 0"),
    }
    r.quantity("assumed_tail", tail.unwrap_or(0.0));
}

/// `A(k−l) ‖h(t_i)‖_l` per sample, with the constant evaluated once.
fn vage_samples(h: &GridSignal, l: WeightOrder, a: f64) -> Vec<f64> {
    h.samples().iter().map(|f| a * f.norm_k(l)).collect()
}

/// `M ≤ ∫ A(k−l) ‖h(t)‖_l dt + tail`, bounding
/// `sup_t ‖y(t)‖_k ≤ M sup_t ‖u(t)‖_k`.
pub fn cont_bibo_sufficient(
    h: &GridSignal,
    k: WeightOrder,
    l: WeightOrder,
    tol: f64,
    tail: Option<f64>,
) -> Result<StabilityReport> {
    let gap = order_gap(k, l)?;
    let mut r = StabilityReport::new(Criterion::Bibo, TimeDomain::Continuous, parameters(h, k, Some(l), tol));
    let a = vage_bracket(f64::from(gap), tol)?.upper;
    let mass = h.integrate(&vage_samples(h, l, a));
    let triangle: Vec<f64> = h.samples().iter().map(|f| multiplier_norm_bound(f, k)).collect();
    r.set_upper(mass + tail.unwrap_or(0.0), "integral of A(k-l)·‖h(t)‖_l plus tail");
    r.quantity("computed_mass", mass);
    r.quantity("triangle_integral", h.integrate(&triangle));
    r.quantity("vage_constant", a);
    r.note(QUADRATURE_NOTE);
    tail_note(&mut r, tail);
    r.vacuous = h.samples().iter().all(ChaosExpansion::is_zero);
    r.decide(None);
    Ok(r)
}

/// `M ≤ (∫ A(k−l)² ‖h(t)‖_l² dt + tail)^{1/2}`, bounding
/// `sup_t ‖y(t)‖_k ≤ M (∫ ‖u(t)‖_k² dt)^{1/2}`. The tail bounds the omitted part
/// of the squared integral.
pub fn l2linf_certify(
    h: &GridSignal,
    k: WeightOrder,
    l: WeightOrder,
    tol: f64,
    tail: Option<f64>,
) -> Result<StabilityReport> {
    let gap = order_gap(k, l)?;
    let mut r = StabilityReport::new(Criterion::L2linf, TimeDomain::Continuous, parameters(h, k, Some(l), tol));
    let a = vage_bracket(f64::from(gap), tol)?.upper;
    let sq: Vec<f64> = vage_samples(h, l, a).iter().map(|v| v * v).collect();
    let mass = h.integrate(&sq);
    r.set_upper((mass + tail.unwrap_or(0.0)).sqrt(), "(integral of A(k-l)²·‖h(t)‖_l² plus tail)^(1/2)");
    r.quantity("computed_mass", mass);
    r.quantity("vage_constant", a);
    r.note(QUADRATURE_NOTE);
    tail_note(&mut r, tail);
    r.vacuous = h.samples().iter().all(ChaosExpansion::is_zero);
    r.decide(None);
    Ok(r)
}

/// Probe vectors for grid systems: normalized basis elements, `random`
/// seeded unit vectors, and the top singular vectors of `T_{h(t_i)}` at the
/// largest sample and at up to eight evenly spaced samples.
pub fn default_grid_probes(h: &GridSignal, k: WeightOrder, random: usize, seed: u64) -> Result<Vec<ChaosExpansion>> {
    let basis = BasisEnumeration::new(h.policy());
    let b = basis.len();
    let mut probes = Vec::new();
    for i in 0..b {
        let mut x = DVector::zeros(b);
        x[i] = Complex64::new(1.0, 0.0);
        probes.push(basis.from_weighted(&x, k)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let x = DVector::from_fn(b, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let n = x.norm();
        if n > 0.0 {
            probes.push(basis.from_weighted(&(x / Complex64::new(n, 0.0)), k)?);
        }
    }
    if h.is_empty() {
        return Ok(probes);
    }
    let norms = h.norms_k(k);
    let peak = norms
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > norms[best] { i } else { best });
    let step = h.len().div_ceil(SINGULAR_PROBE_SAMPLES);
    let mut picks: Vec<usize> = (0..h.len()).step_by(step.max(1)).collect();
    picks.push(peak);
    picks.sort_unstable();
    picks.dedup();
    for i in picks {
        let m = assemble(&h.samples()[i], k, h.policy())?;
        if let Ok(est) = operator_norm(&m, NormMethod::Auto, POWER_TOLERANCE) {
            if est.value > 0.0 {
                probes.push(basis.from_weighted(&est.output, k)?);
            }
        }
    }
    Ok(probes)
}

/// `‖T^*_{h(t_i)} g‖_k` for every sample, per probe.
fn adjoint_norms(h: &GridSignal, k: WeightOrder, probes: &[ChaosExpansion]) -> Result<(Vec<ChaosExpansion>, Vec<Vec<f64>>)> {
    let unit: Vec<ChaosExpansion> = probes
        .iter()
        .filter_map(|g| normalize_k(g, k))
        .map(|g| g.with_policy(h.policy()))
        .collect::<Result<_>>()?;
    let norms = unit
        .par_iter()
        .map(|g| h.samples().iter().map(|f| adjoint_apply(f, g, k).norm_k(k)).collect())
        .collect();
    Ok((unit, norms))
}

fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    values.iter().copied().enumerate().fold(None, |acc, (i, v)| match acc {
        Some((_, b)) if b >= v => acc,
        _ => Some((i, v)),
    })
}

/// Input `u(−s_j) = T^*_{h(s_j)} g · scale_j` on the reflected grid.
fn reflected_witness(h: &GridSignal, k: WeightOrder, g: &ChaosExpansion, scale: impl Fn(f64) -> f64) -> Result<GridSignal> {
    let samples = h
        .samples()
        .iter()
        .rev()
        .map(|f| {
            let a = adjoint_apply(f, g, k);
            let s = scale(a.norm_k(k));
            a.scale(s)
        })
        .collect();
    GridSignal::new(-h.time(h.len().saturating_sub(1)), h.dt(), h.policy(), samples)
}

/// Lower bound `max_g ∫ ‖T^*_{h(t)} g‖_k dt` over unit probes.
///
/// The witness `u(−s) = T^*_{h(s)} g / (‖T^*_{h(s)} g‖_k + ε)` has
/// `sup ‖u‖_k < 1`; its output at `t = 0` pairs with `g` to
/// `∫ ‖T^*g‖² / (‖T^*g‖ + ε)`, reported as `witness_pairing`.
pub fn cont_bibo_probe(
    h: &GridSignal,
    k: WeightOrder,
    probes: &[ChaosExpansion],
    epsilon: f64,
) -> Result<StabilityReport> {
    let mut r = StabilityReport::new(Criterion::Bibo, TimeDomain::Continuous, parameters(h, k, None, 0.0));
    r.parameters.probes = Some(probes.len());
    r.vacuous = h.samples().iter().all(ChaosExpansion::is_zero);
    let (unit, norms) = adjoint_norms(h, k, probes)?;
    let scores: Vec<f64> = norms.iter().map(|n| h.integrate(n)).collect();
    match argmax(&scores) {
        Some((i, lower)) => {
            r.set_lower(lower, "max over unit probes g of the integral of ‖T*_{h(t)} g‖_k");
            if lower > 0.0 {
                let regular: Vec<f64> = norms[i].iter().map(|n| n * n / (n + epsilon)).collect();
                r.quantity("witness_pairing", h.integrate(&regular));
                r.quantity("epsilon", epsilon);
                r.witness = Some(Witness::Continuous(reflected_witness(h, k, &unit[i], |n| 1.0 / (n + epsilon))?));
            }
        }
        None => r.set_lower(0.0, "no probes"),
    }
    r.note(QUADRATURE_NOTE);
    r.decide(None);
    Ok(r)
}

/// Lower bound `max_g (∫ ‖T^*_{h(t)} g‖_k² dt)^{1/2}`, witnessed by the unit-energy
/// input `u(−s) = T^*_{h(s)} g / (∫ ‖T^*g‖²)^{1/2}`.
pub fn l2linf_probe(h: &GridSignal, k: WeightOrder, probes: &[ChaosExpansion]) -> Result<StabilityReport> {
    let mut r = StabilityReport::new(Criterion::L2linf, TimeDomain::Continuous, parameters(h, k, None, 0.0));
    r.parameters.probes = Some(probes.len());
    r.vacuous = h.samples().iter().all(ChaosExpansion::is_zero);
    let (unit, norms) = adjoint_norms(h, k, probes)?;
    let scores: Vec<f64> = norms
        .iter()
        .map(|n| h.integrate(&n.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt())
        .collect();
    match argmax(&scores) {
        Some((i, lower)) => {
            r.set_lower(lower, "max over unit probes g of (integral of ‖T*_{h(t)} g‖_k²)^(1/2)");
            if lower > 0.0 {
                r.witness = Some(Witness::Continuous(reflected_witness(h, k, &unit[i], |_| 1.0 / lower)?));
            }
        }
        None => r.set_lower(0.0, "no probes"),
    }
    r.note(QUADRATURE_NOTE);
    r.decide(None);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{vage_constant, MultiIndex, TruncationPolicy};
    use crate::continuous::wick_convolve_grid;

    fn w(v: u32) -> WeightOrder {
        WeightOrder::new(v).unwrap()
    }

    fn p() -> TruncationPolicy {
        TruncationPolicy::new(2, 2).unwrap()
    }

    fn exponential(dt: f64, horizon: f64) -> GridSignal {
        let n = (horizon / dt).round() as usize + 1;
        GridSignal::deterministic(0.0, dt, n, p(), |t| (-t).exp()).unwrap()
    }

    #[test]
    fn exponential_bounds() {
        let h = exponential(1e-3, 30.0);
        let a = vage_constant(2.0, 1e-12).unwrap();
        let r = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap();
        assert!((r.upper().unwrap() - a).abs() < 1e-4);
        let r2 = l2linf_certify(&h, w(4), w(2), 1e-12, None).unwrap();
        assert!((r2.upper().unwrap() - a / 2f64.sqrt()).abs() < 1e-4);
        let probes = default_grid_probes(&h, w(4), 2, 3).unwrap();
        let lo = cont_bibo_probe(&h, w(4), &probes, DEFAULT_EPSILON).unwrap();
        assert!((lo.lower().unwrap() - 1.0).abs() < 1e-6);
        let lo2 = l2linf_probe(&h, w(4), &probes).unwrap();
        assert!((lo2.lower().unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn first_chaos_exponential() {
        let pol = TruncationPolicy::new(1, 1).unwrap();
        let n = 30_001;
        let h = GridSignal::from_fn(0.0, 1e-3, n, pol, |t| ChaosExpansion::monomial(pol, MultiIndex::unit(1), (-t).exp()).unwrap()).unwrap();
        let r = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap();
        let expect = vage_constant(2.0, 1e-12).unwrap() * 0.5;
        assert!((r.upper().unwrap() - expect).abs() < 1e-4);
    }

    #[test]
    fn zero_response() {
        let h = GridSignal::deterministic(0.0, 0.1, 10, p(), |_| 0.0).unwrap();
        let r = cont_bibo_sufficient(&h, w(4), w(2), 1e-9, None).unwrap();
        assert_eq!(r.upper(), Some(0.0));
        assert!(r.vacuous);
        let r = l2linf_certify(&h, w(4), w(2), 1e-9, Some(0.25)).unwrap();
        assert_eq!(r.upper(), Some(0.5));
    }

    #[test]
    fn witnesses_realize_lower_bounds() {
        let pol = TruncationPolicy::new(2, 2).unwrap();
        let h = GridSignal::from_fn(0.0, 0.05, 21, pol, |t| {
            ChaosExpansion::from_terms(pol, [(MultiIndex::zero(), (-t).exp()), (MultiIndex::unit(2), t.cos())]).unwrap()
        })
        .unwrap();
        let probes = default_grid_probes(&h, w(2), 4, 1).unwrap();
        for r in [cont_bibo_probe(&h, w(2), &probes, DEFAULT_EPSILON).unwrap(), l2linf_probe(&h, w(2), &probes).unwrap()] {
            let Some(Witness::Continuous(u)) = &r.witness else { panic!() };
            let y = wick_convolve_grid(&h, u).unwrap().output;
            let at_zero = (0..y.len()).find(|&i| y.time(i).abs() < 1e-9).unwrap();
            let out = y.samples()[at_zero].norm_k(w(2));
            assert!(out >= r.lower().unwrap() * (1.0 - 1e-6), "{out} vs {:?}", r.lower());
            match r.criterion {
                Criterion::Bibo => assert!(u.sup_norm_k(w(2)) <= 1.0),
                _ => assert!((u.l2_norm_k(w(2)) - 1.0).abs() < 1e-12),
            }
        }
    }
}
