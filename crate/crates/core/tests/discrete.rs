mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use wicksys::chaos::{vage_bracket, vage_constant, ChaosExpansion, EvaluationPoint, MultiIndex};
use wicksys::discrete::{
    bibo_probe, bibo_sufficient, default_probes, dissipativity_check, double_convolution_oracle, l1l2_certify,
    l1l2_probe, random_points, realization_residuals, default_realization_probes, schur_kernel_gram,
    transfer_eval, wick_convolve, wick_convolve_causal, DiscreteSignal, KernelDomain, TransferFunction,
};
use wicksys::report::{Verdict, Witness};

fn relative_gap(a: &DiscreteSignal, b: &DiscreteSignal) -> f64 {
    let scale = a.iter().map(|(_, f)| f.max_abs()).fold(1.0, f64::max);
    a.max_abs_diff(b) / scale
}

#[test]
fn convolution_matches_double_sum() {
    let p = policy(3, 4);
    let mut r = rng(2024);
    for case in 0..200 {
        let lh = 1 + case % 8;
        let lu = 1 + (case * 5) % 8;
        let h = random_signal(&mut r, p, -3, lh, 4);
        let u = random_signal(&mut r, p, 1 - lu, lu, 4);
        let fast = wick_convolve(&h, &u).unwrap().output;
        let slow = double_convolution_oracle(&h, &u).unwrap();
        assert!(relative_gap(&fast, &slow) <= 1e-13, "case {case}");
    }
}

#[test]
fn identity_and_classical_cases() {
    let p = policy(2, 3);
    let u = random_signal(&mut rng(1), p, -2, 5, 3);
    let delta = DiscreteSignal::deterministic(p, &[(0, 1.0)]);
    assert_eq!(wick_convolve(&delta, &u).unwrap().output, u);
    assert!(wick_convolve(&u, &DiscreteSignal::new(p)).unwrap().output.is_empty());

    let h = DiscreteSignal::deterministic(p, &[(0, 1.0), (1, 2.0), (2, -1.0)]);
    let x = DiscreteSignal::deterministic(p, &[(0, 3.0), (1, 0.5)]);
    let y = wick_convolve(&h, &x).unwrap().output;
    let expect = DiscreteSignal::deterministic(p, &[(0, 3.0), (1, 6.5), (2, -2.0), (3, -0.5)]);
    assert!(y.max_abs_diff(&expect) < 1e-15);

    // a single Wick monomial shifts every coefficient by its index
    let beta = MultiIndex::unit(2);
    let hb = DiscreteSignal::impulse(0, ChaosExpansion::monomial(p, beta.clone(), 1.0).unwrap());
    let y = double_convolution_oracle(&hb, &u).unwrap();
    for (n, yn) in y.iter() {
        for alpha in p.basis() {
            let want = alpha.checked_sub(&beta).map(|g| u.sample(n).coeff(&g)).unwrap_or_default();
            assert_eq!(yn.coeff(&alpha), want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn time_invariance(seed in any::<u64>(), s in -5i64..5) {
        let p = policy(2, 3);
        let mut r = rng(seed);
        let h = random_signal(&mut r, p, -2, 4, 3);
        let u = random_signal(&mut r, p, 0, 5, 3);
        let shifted = wick_convolve(&h, &u.shift(s)).unwrap().output;
        let expect = wick_convolve(&h, &u).unwrap().output.shift(s);
        prop_assert!(shifted.max_abs_diff(&expect) <= 1e-14);
    }

    #[test]
    fn causal_convolution_ignores_negative_taps(seed in any::<u64>()) {
        let p = policy(2, 2);
        let mut r = rng(seed);
        let h = random_signal(&mut r, p, -3, 6, 2);
        let u = random_signal(&mut r, p, -1, 4, 2);
        let a = wick_convolve_causal(&h, &u).unwrap().output;
        let b = wick_convolve(&h.causal_part(), &u.causal_part()).unwrap().output;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn signal_json_round_trip(seed in any::<u64>()) {
        let u = random_signal(&mut rng(seed), policy(3, 3), -4, 6, 3);
        let text = serde_json::to_string(&u).unwrap();
        let back: DiscreteSignal = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn convolution_theorem() {
    let p = policy(3, 4);
    let mut r = rng(77);
    let h = random_signal(&mut r, p, -2, 5, 2);
    let u = random_signal(&mut r, p, -1, 4, 2);
    let c = wick_convolve(&h, &u).unwrap();
    assert!(c.loss.is_lossless());
    let (th, tu, ty) = (
        TransferFunction::from_signal(&h),
        TransferFunction::from_signal(&u),
        TransferFunction::from_signal(&c.output),
    );
    for _ in 0..50 {
        let rho = 0.5 + 0.8 * rand::Rng::random::<f64>(&mut r);
        let zeta = Complex64::from_polar(rho, rand::Rng::random_range(&mut r, 0.0..std::f64::consts::TAU));
        let z = EvaluationPoint::new(random_point(&mut r, 3, 0.5));
        let lhs = transfer_eval(&ty, zeta, &z);
        let rhs = transfer_eval(&th, zeta, &z) * transfer_eval(&tu, zeta, &z);
        assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    let one = TransferFunction::causal(p, vec![ChaosExpansion::constant(p, 1.0)]).unwrap();
    let z = EvaluationPoint::real(&[0.3, -0.2]);
    assert_eq!(transfer_eval(&one, Complex64::new(0.1, 0.4), &z), Complex64::new(1.0, 0.0));
    let zeta = Complex64::new(0.3, 0.2);
    assert!((th.eval(zeta, &EvaluationPoint::origin()) - th.nonrandom_part(zeta)).norm() < 1e-15);
}

#[test]
fn classical_bibo_reduction() {
    let p = policy(2, 3);
    let taps: Vec<(i64, f64)> = (-6..=9).map(|n: i64| (n, (0.7f64).powi(n.abs() as i32) * if n % 3 == 0 { -1.0 } else { 1.0 })).collect();
    let sum: f64 = taps.iter().map(|t| t.1.abs()).sum();
    let h = DiscreteSignal::deterministic(p, &taps);
    let probes = default_probes(&h, w(4), 4, 3).unwrap();
    let lo = bibo_probe(&h, w(4), &probes).unwrap();
    assert!((lo.lower().unwrap() - sum).abs() <= 1e-12);
    let hi = bibo_sufficient(&h, w(4), w(2), 1e-12).unwrap();
    assert!((hi.quantities["triangle_sum"] - sum).abs() <= 1e-12);
    let a = vage_bracket(2.0, 1e-12).unwrap().upper;
    assert!((hi.upper().unwrap() / a - sum).abs() <= 1e-12);
}

#[test]
fn basel_partial_sums() {
    let p = policy(1, 2);
    let a = vage_constant(2.0, 1e-12).unwrap();
    let limit = std::f64::consts::PI / 6f64.sqrt();
    for n_max in [10usize, 100, 1000, 10_000] {
        let taps: Vec<(i64, f64)> = (0..=n_max as i64).map(|n| (n, 1.0 / (n + 1) as f64)).collect();
        let h = DiscreteSignal::deterministic(p, &taps);
        let r = l1l2_certify(&h, w(4), w(2), 1e-12).unwrap();
        let h2 = r.quantities["transfer_h2_norm"];
        // Σ_{m > N+1} 1/m² < 1/(N+1)
        let tail = 1.0 / (n_max + 1) as f64;
        assert!(h2 <= limit && limit * limit - h2 * h2 <= tail, "N = {n_max}: {h2}");
        assert!((r.upper().unwrap() - a * h2).abs() <= 1e-12);
    }
}

#[test]
fn l1l2_simulation_ratio() {
    let p = policy(2, 3);
    let mut r = rng(8);
    for _ in 0..30 {
        let h = random_signal(&mut r, p, 0, 8, 3);
        let u = random_signal(&mut r, p, 0, 8, 3);
        let m = l1l2_certify(&h, w(4), w(2), 1e-12).unwrap().upper().unwrap();
        let y = wick_convolve(&h, &u).unwrap().output;
        let ratio = y.l2_norm_k(w(4)) / u.l1_norm_k(w(4));
        assert!(ratio <= m, "{ratio} > {m}");
        let lo = l1l2_probe(&h, w(4), &default_probes(&h, w(4), 2, 1).unwrap()).unwrap();
        assert!(lo.lower().unwrap() <= m);
    }
}

#[test]
fn dissipativity_fixtures() {
    let p = policy(1, 0);
    for (c, verdict) in [(0.0, Verdict::Certified), (0.6, Verdict::Certified), (1.0, Verdict::Certified), (1.2, Verdict::Refuted)] {
        let h = DiscreteSignal::deterministic(p, &[(0, c)]);
        let r = dissipativity_check(&h, w(4), Some(w(2)), p, 16, 1e-9).unwrap();
        assert_eq!(r.verdict, verdict, "c = {c}");
        assert_eq!(r.witness.is_some(), verdict == Verdict::Refuted || c > 0.0);
    }
    let h = DiscreteSignal::deterministic(p, &[(0, 0.5), (1, 0.5)]);
    let r = dissipativity_check(&h, w(4), None, p, 256, 1e-9).unwrap();
    assert!((r.quantities["sigma_max"] - 1.0).abs() <= 1e-3);
}

#[test]
fn dissipativity_agrees_with_simulation() {
    let p = policy(2, 2);
    let n_time = 12;
    let mut r = rng(31);
    for _ in 0..5 {
        let h = random_signal(&mut r, p, 0, 3, 2);
        let rep = dissipativity_check(&h, w(3), None, p, n_time, 1e-10).unwrap();
        let sigma = rep.quantities["sigma_max"];
        let window = |y: &DiscreteSignal| {
            DiscreteSignal::from_samples(p, y.iter().filter(|(n, _)| (0..n_time as i64).contains(n)).map(|(n, f)| (n, f.clone()))).unwrap()
        };
        for _ in 0..5 {
            let u = random_signal(&mut r, p, 0, n_time as i64, 2);
            let y = window(&wick_convolve_causal(&h, &u).unwrap().output);
            assert!(y.l2_norm_k(w(3)) <= sigma * u.l2_norm_k(w(3)) * (1.0 + 1e-10));
        }
        let Some(Witness::Discrete(u)) = &rep.witness else { panic!("no witness") };
        let y = window(&wick_convolve_causal(&h, u).unwrap().output);
        let ratio = y.l2_norm_k(w(3)) / u.l2_norm_k(w(3));
        assert!((ratio - sigma).abs() <= 1e-8 * sigma, "{ratio} vs {sigma}");
    }
}

#[test]
fn schur_kernel_positivity() {
    let p = policy(2, 2);
    let mut r = rng(40);
    let pts = random_points(&mut r, 20, w(2), 2, KernelDomain::Disk, 0.9, 0.5);
    for (c, positive) in [(0.0, true), (0.5, true), (1.0, true), (1.1, false)] {
        let h = TransferFunction::causal(p, vec![ChaosExpansion::constant(p, c)]).unwrap();
        let g = schur_kernel_gram(&h, &pts, w(2)).unwrap();
        assert_eq!(g.min_eigenvalue >= -1e-10 * g.trace, positive, "c = {c}");
    }
    let zeta = TransferFunction::causal(p, vec![ChaosExpansion::zero(p), ChaosExpansion::constant(p, 1.0)]).unwrap();
    let g = schur_kernel_gram(&zeta, &pts, w(2)).unwrap();
    assert!(g.min_eigenvalue >= -1e-10 * g.trace);
}

#[test]
fn realization_reproduces_coefficients() {
    let p = policy(2, 6);
    let mut r = rng(50);
    for _ in 0..50 {
        let taps: Vec<ChaosExpansion> = (0..4).map(|_| sparse_expansion(&mut r, p, 3, 0.6)).collect();
        let s = TransferFunction::causal(p, taps).unwrap();
        let check = realization_residuals(&s, p, 6, &default_realization_probes(p)).unwrap();
        assert!(check.max_residual <= 1e-12, "{}", check.max_residual);
    }

    // one tap at ζ: only C B survives
    let s1 = sparse_expansion(&mut r, p, 2, 1.0);
    let s = TransferFunction::causal(p, vec![ChaosExpansion::zero(p), s1.clone()]).unwrap();
    let real = wicksys::discrete::Realization::new(&s, p).unwrap();
    let x = ChaosExpansion::monomial(p, MultiIndex::unit(1), 1.0).unwrap();
    assert!(real.coefficient(1, &x).max_abs_diff(&s1.wick(&x).0) < 1e-15);
    for n in 2..6 {
        assert!(real.coefficient(n, &x).is_zero());
    }
}
