use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chaos::{order_gap, vage_bracket, ChaosExpansion, WeightOrder};
use crate::error::{Error, Result};
use crate::operators::{
    adjoint_apply, assemble, multiplier_norm_bound, operator_norm,
    BasisEnumeration, NormMethod, POWER_TOLERANCE,
};
use crate::report::{Criterion, ReportParameters, StabilityReport, TimeDomain, Witness};

use super::signal::DiscreteSignal;

/// Scales `v` to unit `‖·‖_k`; `None` for the zero vector.
pub fn normalize_k(v: &ChaosExpansion, k: WeightOrder) -> Option<ChaosExpansion> {
    let n = v.norm_k(k);
    (n > 0.0 && n.is_finite()).then(|| v.scale(1.0 / n))
}

/// Probe vectors for the lower-bound searches, in a fixed order:
///
/// 1. every basis element `H_α / ‖H_α‖_k` of the policy slice,
/// 2. `random` unit vectors with i.i.d. uniform weighted coordinates drawn
///    from a ChaCha8 stream seeded with `seed`,
/// 3. the top left and right singular vectors of each `T_{h_n}`.
pub fn default_probes(
    h: &DiscreteSignal,
    k: WeightOrder,
    random: usize,
    seed: u64,
) -> Result<Vec<ChaosExpansion>> {
    let basis = BasisEnumeration::new(h.policy());
    let b = basis.len();
    let mut probes = Vec::with_capacity(b + random + 2 * h.len());
    for i in 0..b {
        let mut x = DVector::zeros(b);
        x[i] = Complex64::new(1.0, 0.0);
        probes.push(basis.from_weighted(&x, k)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let x = DVector::from_fn(b, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let n = x.norm();
        if n > 0.0 {
            probes.push(basis.from_weighted(&(x / Complex64::new(n, 0.0)), k)?);
        }
    }
    let singular: Vec<Result<Vec<ChaosExpansion>>> = h
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(_, hn)| {
            let m = assemble(hn, k, h.policy())?;
            match operator_norm(&m, NormMethod::Auto, POWER_TOLERANCE) {
                Ok(est) if est.value > 0.0 => Ok(vec![
                    basis.from_weighted(&est.output, k)?,
                    basis.from_weighted(&est.input, k)?,
                ]),
                // a failed or zero estimate only costs probe quality
                _ => Ok(Vec::new()),
            }
        })
        .collect();
    for s in singular {
        probes.extend(s?);
    }
    Ok(probes)
}

fn parameters(h: &DiscreteSignal, k: WeightOrder, l: Option<WeightOrder>, tol: f64) -> ReportParameters {
    let mut p = ReportParameters::new(k.get(), h.policy(), tol);
    p.l = l.map(WeightOrder::get);
    p
}

/// `argmax` over probe scores, first index on ties.
fn best(scores: &[f64]) -> Option<(usize, f64)> {
    scores
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, s)| s.is_finite())
        .fold(None, |acc, (i, s)| match acc {
            Some((_, b)) if b >= s => acc,
            _ => Some((i, s)),
        })
}

/// Upper bound `Σ_n A(k−l) ‖h_n‖_l` for the BIBO gain
/// `sup_n ‖y_n‖_k ≤ M sup_n ‖u_n‖_k`.
pub fn bibo_sufficient(
    h: &DiscreteSignal,
    k: WeightOrder,
    l: WeightOrder,
    tol: f64,
) -> Result<StabilityReport> {
    let gap = order_gap(k, l)?;
    let a = vage_bracket(f64::from(gap), tol)?.upper;
    let mut r = StabilityReport::new(Criterion::Bibo, TimeDomain::Discrete, parameters(h, k, Some(l), tol));
    let mut upper = 0.0;
    let mut triangle = 0.0;
    for (_, hn) in h.iter() {
        upper += a * hn.norm_k(l);
        triangle += multiplier_norm_bound(hn, k);
    }
    r.set_upper(upper, "sum over n of A(k-l)·‖h_n‖_l");
    r.quantity("vage_constant", a);
    r.quantity("triangle_sum", triangle);
    r.vacuous = h.is_empty();
    r.decide(None);
    Ok(r)
}

/// Lower bound `max_v Σ_n ‖T^*_{h_n} v‖_k` over unit probes `v`.
///
/// The witness is the input `u_{−n} = T^*_{h_n} v / ‖T^*_{h_n} v‖_k`, which has
/// `sup ‖u‖_k = 1` and yields `‖y_0‖_k ≥ |⟨y_0, v⟩_k| = Σ_n ‖T^*_{h_n} v‖_k`.
pub fn bibo_probe(
    h: &DiscreteSignal,
    k: WeightOrder,
    probes: &[ChaosExpansion],
) -> Result<StabilityReport> {
    let mut r = StabilityReport::new(Criterion::Bibo, TimeDomain::Discrete, parameters(h, k, None, 0.0));
    r.parameters.probes = Some(probes.len());
    r.vacuous = h.is_empty();
    let unit = normalized(probes, h, k)?;
    let taps: Vec<_> = h.iter().collect();
    let scores: Vec<f64> = unit
        .par_iter()
        .map(|v| taps.iter().map(|(_, hn)| adjoint_apply(hn, v, k).norm_k(k)).sum())
        .collect();
    let Some((i, lower)) = best(&scores) else {
        r.set_lower(0.0, "no probes");
        r.decide(None);
        return Ok(r);
    };
    let v = &unit[i];
    let mut witness = DiscreteSignal::new(h.policy());
    for (n, hn) in &taps {
        if let Some(u) = normalize_k(&adjoint_apply(hn, v, k), k) {
            witness.add(-n, &u)?;
        }
    }
    r.set_lower(lower, "max over unit probes v of sum over n of ‖T*_{h_n} v‖_k");
    if !witness.is_empty() {
        r.witness = Some(Witness::Discrete(witness));
    }
    r.decide(None);
    Ok(r)
}

fn normalized(probes: &[ChaosExpansion], h: &DiscreteSignal, k: WeightOrder) -> Result<Vec<ChaosExpansion>> {
    probes
        .iter()
        .filter_map(|v| normalize_k(v, k))
        .map(|v| v.with_policy(h.policy()))
        .collect()
}

fn require_causal(h: &DiscreteSignal) -> Result<()> {
    if h.is_causal() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("the impulse response must vanish for n < 0".into()))
    }
}

/// Upper bound `M = A(k−l) ‖ℋ‖` with `‖ℋ‖ = (Σ_n ‖h_n‖_l²)^{1/2}` for the gain
/// `(Σ ‖y_n‖_k²)^{1/2} ≤ M Σ ‖u_n‖_k`.
pub fn l1l2_certify(
    h: &DiscreteSignal,
    k: WeightOrder,
    l: WeightOrder,
    tol: f64,
) -> Result<StabilityReport> {
    require_causal(h)?;
    let gap = order_gap(k, l)?;
    let a = vage_bracket(f64::from(gap), tol)?.upper;
    let h2: f64 = h.l2_norm_k(l);
    let mut r = StabilityReport::new(Criterion::L1l2, TimeDomain::Discrete, parameters(h, k, Some(l), tol));
    r.set_upper(a * h2, "A(k-l)·(sum over n of ‖h_n‖_l²)^(1/2)");
    r.quantity("vage_constant", a);
    r.quantity("transfer_h2_norm", h2);
    r.vacuous = h.is_empty();
    r.decide(None);
    Ok(r)
}

/// Lower bound `max_v (Σ_n ‖h_n ◊ v‖_k²)^{1/2}` over unit probes, witnessed by
/// the impulse input `u_0 = v`.
pub fn l1l2_probe(
    h: &DiscreteSignal,
    k: WeightOrder,
    probes: &[ChaosExpansion],
) -> Result<StabilityReport> {
    let mut r = StabilityReport::new(Criterion::L1l2, TimeDomain::Discrete, parameters(h, k, None, 0.0));
    r.parameters.probes = Some(probes.len());
    r.vacuous = h.is_empty();
    let unit = normalized(probes, h, k)?;
    let taps: Vec<_> = h.iter().map(|(_, f)| f).collect();
    let scores: Vec<f64> = unit
        .par_iter()
        .map(|v| {
            taps.iter()
                .map(|hn| {
                    let y = hn.wick(v).0.norm_k(k);
                    y * y
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    match best(&scores) {
        Some((i, lower)) => {
            r.set_lower(lower, "max over unit probes v of (sum over n of ‖h_n ◊ v‖_k²)^(1/2)");
            if lower > 0.0 {
                r.witness = Some(Witness::Discrete(DiscreteSignal::impulse(0, unit[i].clone())));
            }
        }
        None => r.set_lower(0.0, "no probes"),
    }
    r.decide(None);
    Ok(r)
}
