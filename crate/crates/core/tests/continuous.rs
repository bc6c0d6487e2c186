mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use wicksys::chaos::{vage_bracket, ChaosExpansion, EvaluationPoint, MultiIndex, TruncationPolicy};
use wicksys::continuous::{
    cont_bibo_probe, cont_bibo_sufficient, cont_transfer_check, default_grid_probes, grid_convolution_oracle,
    l2linf_certify, l2linf_probe, wick_convolve_grid, GridSignal, DEFAULT_EPSILON,
};
use wicksys::operators::adjoint_apply;

fn scalar() -> TruncationPolicy {
    policy(1, 0)
}

fn exponential(dt: f64, horizon: f64, p: TruncationPolicy) -> GridSignal {
    let n = (horizon / dt).round() as usize + 1;
    GridSignal::deterministic(0.0, dt, n, p, |t| (-t).exp()).unwrap()
}

fn a2() -> f64 {
    vage_bracket(2.0, 1e-12).unwrap().upper
}

#[test]
fn exponential_against_box() {
    let error = |dt: f64| {
        let h = exponential(dt, 20.0, scalar());
        let u = GridSignal::deterministic(0.0, dt, (1.0 / dt).round() as usize + 1, scalar(), |_| 1.0).unwrap();
        let y = wick_convolve_grid(&h, &u).unwrap().output;
        (0..y.len())
            .map(|i| {
                let t = y.time(i);
                if t > 20.0 {
                    return 0.0;
                }
                let exact = (-(t - 1.0).max(0.0)).exp() - (-t).exp();
                (y.samples()[i].mean().re - exact).abs()
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (error(0.02), error(0.01));
    assert!((3.5..4.5).contains(&(e1 / e2)), "{e1} / {e2}");
}

#[test]
fn point_mass_reproduces_input() {
    let p = policy(2, 2);
    let dt = 0.05;
    let delta = GridSignal::new(0.0, dt, p, vec![ChaosExpansion::constant(p, 1.0 / dt)]).unwrap();
    let u = random_grid(&mut rng(3), p, 0.0, dt, 12, 2);
    let y = wick_convolve_grid(&delta, &u).unwrap().output;
    assert!(y.max_abs_diff(&u).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_matches_oracle(seed in any::<u64>(), nh in 1usize..9, nu in 1usize..9) {
        let p = policy(2, 3);
        let mut r = rng(seed);
        let h = random_grid(&mut r, p, 0.0, 0.1, nh, 3);
        let u = random_grid(&mut r, p, -0.4, 0.1, nu, 3);
        let fast = wick_convolve_grid(&h, &u).unwrap().output;
        let slow = grid_convolution_oracle(&h, &u).unwrap();
        prop_assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-12);
    }

    #[test]
    fn grid_json_round_trip(seed in any::<u64>()) {
        let g = random_grid(&mut rng(seed), policy(2, 2), -0.25, 0.05, 6, 2);
        let text = serde_json::to_string(&g).unwrap();
        let back: GridSignal = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn classical_criteria_converge_at_second_order() {
    let horizon = 5.0;
    let errors = |dt: f64| {
        let h = exponential(dt, horizon, scalar());
        let l1 = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap().quantities["computed_mass"] / a2();
        let l2 = l2linf_certify(&h, w(4), w(2), 1e-12, None).unwrap().quantities["computed_mass"].sqrt() / a2();
        (
            (l1 - (1.0 - (-horizon).exp())).abs(),
            (l2 - ((1.0 - (-2.0 * horizon).exp()) / 2.0).sqrt()).abs(),
        )
    };
    let (a1, b1) = errors(0.02);
    let (a2_, b2) = errors(0.01);
    assert!((3.9..4.1).contains(&(a1 / a2_)), "{}", a1 / a2_);
    assert!((3.9..4.1).contains(&(b1 / b2)), "{}", b1 / b2);
}

#[test]
fn analytic_bounds() {
    let p = policy(2, 2);
    let h = exponential(1e-3, 30.0, p);
    let r = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap();
    assert!((r.upper().unwrap() - a2()).abs() < 1e-4);
    let r = l2linf_certify(&h, w(4), w(2), 1e-12, None).unwrap();
    assert!((r.upper().unwrap() - a2() / 2f64.sqrt()).abs() < 1e-4);

    let e1 = ChaosExpansion::monomial(p, MultiIndex::unit(1), 1.0).unwrap();
    let h = GridSignal::from_fn(0.0, 1e-3, 30_001, p, |t| e1.scale((-t).exp())).unwrap();
    let r = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap();
    assert!((r.upper().unwrap() - a2() * 0.5).abs() < 1e-4);

    let zero = GridSignal::new(0.0, 0.1, p, vec![ChaosExpansion::zero(p); 4]).unwrap();
    assert_eq!(cont_bibo_sufficient(&zero, w(4), w(2), 1e-12, None).unwrap().upper(), Some(0.0));
    assert_eq!(l2linf_certify(&zero, w(4), w(2), 1e-12, None).unwrap().upper(), Some(0.0));
}

#[test]
fn deterministic_probe_gives_classical_integral() {
    let p = policy(2, 2);
    let h = GridSignal::deterministic(0.0, 0.01, 301, p, |t| (3.0 * t).sin()).unwrap();
    let classical = h.integrate(&h.samples().iter().map(|f| f.mean().norm()).collect::<Vec<_>>());
    let probes = default_grid_probes(&h, w(4), 3, 0).unwrap();
    for g in probes.iter().take(3) {
        let r = cont_bibo_probe(&h, w(4), std::slice::from_ref(g), DEFAULT_EPSILON).unwrap();
        assert!((r.lower().unwrap() - classical).abs() < 1e-12);
    }
}

#[test]
fn probes_never_exceed_upper_bounds() {
    let p = policy(2, 2);
    let mut r = rng(100);
    for case in 0..100 {
        let n = 2 + case % 9;
        let h = random_grid(&mut r, p, 0.0, 0.1, n, 2);
        let probes = default_grid_probes(&h, w(4), 4, case as u64).unwrap();
        let lo = cont_bibo_probe(&h, w(4), &probes, DEFAULT_EPSILON).unwrap().lower().unwrap();
        let hi = cont_bibo_sufficient(&h, w(4), w(2), 1e-12, None).unwrap().upper().unwrap();
        assert!(lo <= hi, "case {case}: bibo {lo} > {hi}");
        let lo = l2linf_probe(&h, w(4), &probes).unwrap().lower().unwrap();
        let hi = l2linf_certify(&h, w(4), w(2), 1e-12, None).unwrap().upper().unwrap();
        assert!(lo <= hi, "case {case}: l2linf {lo} > {hi}");
    }
}

#[test]
fn wick_continuity_on_neighbours() {
    let p = policy(2, 4);
    let mut r = rng(5);
    let f = random_grid(&mut r, p, 0.0, 0.1, 20, 2);
    let g = random_grid(&mut r, p, 0.0, 0.1, 20, 2);
    let (k, l) = (w(4), w(2));
    for i in 0..19 {
        let (f1, f2) = (&f.samples()[i], &f.samples()[i + 1]);
        let (g1, g2) = (&g.samples()[i], &g.samples()[i + 1]);
        let (p1, loss1) = f1.wick(g1);
        let (p2, loss2) = f2.wick(g2);
        assert!(loss1.is_lossless() && loss2.is_lossless());
        let lhs = p1.axpy(-1.0, &p2).norm_k(k);
        let df = f1.axpy(-1.0, f2);
        let dg = g1.axpy(-1.0, g2);
        let rhs = a2() * (df.norm_k(l) * g1.norm_k(k) + f2.norm_k(l) * dg.norm_k(k));
        assert!(lhs <= rhs, "{lhs} > {rhs}");

        let probe = g1.scale(1.0 / g1.norm_k(k));
        let t1 = adjoint_apply(f1, &probe, k).norm_k(k);
        let t2 = adjoint_apply(f2, &probe, k).norm_k(k);
        assert!((t1 - t2).abs() <= a2() * df.norm_k(l) + 1e-15);
    }
}

#[test]
fn l2linf_simulation_consistency() {
    let p = policy(2, 2);
    let dt = 0.05;
    let mut r = rng(12);
    for _ in 0..10 {
        let h = random_grid(&mut r, p, 0.0, dt, 15, 2);
        let m = l2linf_certify(&h, w(4), w(2), 1e-12, None).unwrap().upper().unwrap();
        let u = random_grid(&mut r, p, 0.0, dt, 20, 2);
        let scale = u.l2_norm_k(w(4));
        let u = u.map_samples(|f| f.scale(1.0 / scale)).unwrap();
        let y = wick_convolve_grid(&h, &u).unwrap().output;
        assert!(y.sup_norm_k(w(4)) <= m * (1.0 + 4.0 * dt));
    }
}

#[test]
fn laplace_convolution_theorem() {
    let dt = 1e-3;
    let h = exponential(dt, 20.0, scalar());
    let u = GridSignal::deterministic(0.0, dt, 1001, scalar(), |_| 1.0).unwrap();
    let freqs: Vec<Complex64> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&w| Complex64::new(0.0, w)).collect();
    let pts = [EvaluationPoint::origin()];
    assert!(cont_transfer_check(&h, &u, &freqs, &pts).unwrap() <= 1e-4);

    let p = policy(2, 2);
    let h = random_grid(&mut rng(9), p, 0.0, 0.1, 6, 2);
    let zero = GridSignal::new(0.0, 0.1, p, vec![ChaosExpansion::zero(p); 3]).unwrap();
    let pts = [EvaluationPoint::real(&[0.2, -0.1])];
    assert_eq!(cont_transfer_check(&h, &zero, &freqs, &pts).unwrap(), 0.0);
}
