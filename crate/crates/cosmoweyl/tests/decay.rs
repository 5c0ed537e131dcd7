use cosmoweyl::belrobinson::energy_closure;
use cosmoweyl::charts::{SdSParams, SdsGeometry};
use cosmoweyl::decay::*;
use cosmoweyl::Error;
use proptest::prelude::*;

fn zero(_: f64) -> f64 {
    0.0
}

fn problem<'a>(kappa: &'a dyn Fn(f64) -> f64, k0: f64, k1: f64, h: &'a dyn Fn(f64) -> f64, f0: f64, r0: f64, c: f64) -> DecayProblem<'a, f64> {
    DecayProblem { kappa, kappa0: k0, kappa1: k1, h, f0, r0, c }
}

#[test]
fn constant_rate_is_saturated() {
    let k = |_: f64| 6.0;
    let p = problem(&k, 6.0, 6.0, &zero, 1.0, 1.0, 1.0);
    let b = gronwall_bound(&p).unwrap();
    assert_eq!((b.k1, b.h1), (0.0, 0.0));
    assert!((b.prefactor - 1.0).abs() < 1e-15);
    assert!((b.constant - 1.0 / (1.0 - 2f64.powi(-6))).abs() < 1e-14);
    // exact solution r⁻⁶: r⁶ f ≡ 1, within the bound and the raw form is sharp asymptotically
    for r in [2.0f64, 5.0, 100.0] {
        assert!(r.powi(-6) <= b.bound(r).unwrap());
        let raw = b.raw_bound(r).unwrap();
        assert!(r.powi(-6) <= raw && raw * r.powi(6) < 1.0 + 2.0 * r.powi(-6));
    }
    let sol = solve_equality(&p, 1e3, 4000).unwrap();
    for &(r, f) in &sol {
        assert!((f * r.powi(6) - 1.0).abs() < 1e-7, "{r}: {f}");
    }
}

#[test]
fn bound_only_valid_beyond_twice_r0() {
    let k = |_: f64| 6.0;
    let b = gronwall_bound(&problem(&k, 6.0, 6.0, &zero, 1.0, 1.5, 1.0)).unwrap();
    assert!(matches!(b.bound(2.9), Err(Error::Domain(_))));
    assert!(b.bound(3.0).is_ok());
    assert!(b.raw_bound(1.5).is_err());
}

#[test]
fn variable_rate_picks_up_exponential_factor() {
    for r0 in [1.0f64, 2.0, 5.0] {
        let k = |r: f64| 6.0 - 1.0 / r;
        let p = problem(&k, 6.0 - 1.0 / r0, 6.0, &zero, 0.7, r0, 1.0);
        let b = gronwall_bound(&p).unwrap();
        assert!((b.k1 - 1.0 / r0).abs() < 1e-10, "K1 = {}", b.k1);
        // closed form of the equality solution: f = f₀ (r₀/r)⁶ e^{1/r₀ − 1/r}
        let exact = |r: f64| 0.7 * (r0 / r).powi(6) * (1.0 / r0 - 1.0 / r).exp();
        let sol = solve_equality(&p, 1e3 * r0, 6000).unwrap();
        let mut sup: f64 = 0.0;
        for &(r, f) in &sol {
            assert!(((f - exact(r)) / exact(r)).abs() < 1e-8);
            if r >= 2.0 * r0 {
                assert!(f <= b.bound(r).unwrap());
                sup = sup.max(f * r.powi(6));
            }
        }
        let measured = verify_decay(&sol, 6.0, SampleRange::Unbounded).unwrap();
        assert!(measured.sup_c <= b.constant);
        let ratio = b.constant / sup;
        assert!(ratio >= 1.0 && ratio <= b.slack() * (1.0 + 1e-9), "{ratio} vs {}", b.slack());
        assert!(ratio <= (1.0 / r0).exp() * (6.0 / (6.0 - 1.0 / r0)) / (1.0 - 2f64.powi(-6)) + 1e-9);
    }
}

#[test]
fn forced_problem_has_finite_h1() {
    let (eps, c) = (0.3, 0.2);
    let k1 = 6.0 - eps - c;
    let k = move |_: f64| k1;
    let h = move |r: f64| r.powf(-6.0 + eps);
    for r0 in [1.0f64, 3.0] {
        let p = problem(&k, k1, k1, &h, 1.0, r0, 0.5);
        let b = gronwall_bound(&p).unwrap();
        let h1 = r0.powf(-c) / c;
        assert!(((b.h1 - h1) / h1).abs() < 1e-8, "{} vs {h1}", b.h1);
        let sol = solve_equality(&p, 1e4 * r0, 8000).unwrap();
        for &(r, f) in sol.iter().filter(|s| s.0 >= 2.0 * r0) {
            assert!(f <= b.bound(r).unwrap() * (1.0 + 1e-9));
        }
    }
}

#[test]
fn divergent_weights_rejected() {
    // κ₁ − κ ~ 1 / log r: K diverges
    let k = |r: f64| 6.0 - 0.5 / (1.0 + r.ln());
    let p = problem(&k, 5.5, 6.0, &zero, 1.0, 1.0, 1.0);
    assert!(matches!(gronwall_bound(&p), Err(Error::DivergentWeight(_))));
    // forcing too strong for the rate: H diverges
    let k = |_: f64| 6.0;
    let h = |r: f64| r.powf(-5.5);
    let p = problem(&k, 6.0, 6.0, &h, 1.0, 1.0, 1.0);
    match gronwall_bound(&p) {
        Err(Error::DivergentWeight(s)) => assert!(s.starts_with('H')),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_problems_rejected() {
    let k = |_: f64| 6.0;
    assert!(gronwall_bound(&problem(&k, 0.0, 6.0, &zero, 1.0, 1.0, 1.0)).is_err());
    assert!(gronwall_bound(&problem(&k, 6.0, 6.0, &zero, -1.0, 1.0, 1.0)).is_err());
    let k = |r: f64| 6.0 + 1.0 / r;
    assert!(matches!(gronwall_bound(&problem(&k, 6.0, 6.0, &zero, 1.0, 1.0, 1.0)), Err(Error::Domain(_))));
}

#[test]
fn verify_decay_examples() {
    let rs: Vec<f64> = (0..=200).map(|i| 10f64.powf(i as f64 / 25.0)).collect();
    let pure: Vec<(f64, f64)> = rs.iter().map(|&r| (r, r.powi(-6))).collect();
    let c = verify_decay(&pure, 6.0, SampleRange::Unbounded).unwrap();
    assert!((c.sup_c - 1.0).abs() < 1e-12 && c.holds);
    let logged: Vec<(f64, f64)> = rs.iter().map(|&r| (r, r.powi(-6) * r.ln())).collect();
    let u = verify_decay(&logged, 6.0, SampleRange::Unbounded).unwrap();
    assert!(!u.holds && u.r_at_sup == 1e8);
    let b = verify_decay(&logged, 6.0, SampleRange::Bounded).unwrap();
    assert!(b.holds && (b.sup_c - 1e8f64.ln()).abs() < 1e-9);
    assert!(verify_decay(&[(2.0, 1.0), (1.0, 1.0)], 6.0, SampleRange::Bounded).is_err());
}

/// Flux of the exact Schwarzschild-de Sitter curvature through `Σ_r` per
/// unit static time: `√F 4πr² · 12ρ²/(8F^{3/2}) = 24π m² r⁻⁴ / F`, so
/// its local decay exponent is `−4 − rF′/F → −6`.
#[test]
fn sds_flux_decay_exponent() {
    let (lambda, m) = (3.0, 0.1);
    let geo = SdsGeometry::new(SdSParams::new(lambda, m).unwrap()).unwrap();
    let f = |r: f64| lambda / 3.0 * r * r - 1.0 + 2.0 * m / r;
    let df = |r: f64| 2.0 * lambda / 3.0 * r - 2.0 * m / (r * r);
    let rows = energy_closure(&geo, 50.0, 1050.0, 100).unwrap();
    for w in rows.windows(2).step_by(10) {
        let (a, b) = (w[0], w[1]);
        let closed = |r: f64| 24.0 * std::f64::consts::PI * m * m / (r.powi(4) * f(r));
        assert!(((a.flux - closed(a.r)) / closed(a.r)).abs() < 1e-12);
        let slope = (b.flux / a.flux).ln() / (b.r / a.r).ln();
        let rm = (a.r * b.r).sqrt();
        let want = -4.0 - rm * df(rm) / f(rm);
        assert!((slope - want).abs() < 1e-3, "{slope} vs {want}");
    }
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.r, r.flux)).collect();
    let last = rows.last().unwrap();
    assert!((-4.0 - last.r * df(last.r) / f(last.r) + 6.0).abs() < 1e-5);
    let v = verify_decay(&samples, 6.0, SampleRange::Unbounded).unwrap();
    assert!(v.holds && v.r_at_sup == 50.0);
}

proptest! {
    #[test]
    fn bound_monotone_in_inputs(
        k1 in 0.0..3.0f64, h1 in 0.0..10.0f64, kap0 in 1.0..6.0f64, extra in 0.0..3.0f64,
        f0 in 0.0..5.0f64, r0 in 0.5..5.0f64, c in 0.0..2.0f64, d in 0.01..1.0f64,
    ) {
        let kap1 = kap0 + extra;
        let base = GronwallBound::from_integrals(k1, h1, kap0, kap1, f0, r0, c).constant;
        prop_assume!(base > 0.0);
        prop_assert!(GronwallBound::from_integrals(k1 + d, h1, kap0, kap1, f0, r0, c).constant > base);
        if c > 0.0 {
            prop_assert!(GronwallBound::from_integrals(k1, h1 + d, kap0, kap1, f0, r0, c).constant > base);
        }
        // κ₁/κ₀ up through a smaller κ₀
        prop_assert!(GronwallBound::from_integrals(k1, h1, kap0 / (1.0 + d), kap1, f0, r0, c).constant > base);
    }

    #[test]
    fn equality_solution_never_violates_bound(
        a in 0.0..2.0f64, kap1 in 3.0..7.0f64, r0 in 0.5..4.0f64, f0 in 0.1..3.0f64,
    ) {
        let k = move |r: f64| kap1 - a / r;
        let kap0 = kap1 - a / r0;
        prop_assume!(kap0 > 0.2);
        let p = DecayProblem { kappa: &k, kappa0: kap0, kappa1: kap1, h: &zero, f0, r0, c: 1.0 };
        let b = gronwall_bound(&p).unwrap();
        prop_assert!((b.k1 - a / r0).abs() < 1e-9);
        let sol = solve_equality(&p, 200.0 * r0, 2000).unwrap();
        let mut sup: f64 = 0.0;
        for &(r, f) in sol.iter().filter(|s| s.0 >= 2.0 * r0) {
            prop_assert!(f <= b.bound(r).unwrap());
            sup = sup.max(f * r.powf(kap1));
        }
        prop_assert!(b.constant / sup <= b.slack() * (1.0 + 1e-8));
    }
}
