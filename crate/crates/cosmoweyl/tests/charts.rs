use cosmoweyl::analysis::{area_radius, SphereGrid};
use cosmoweyl::charts::*;
use cosmoweyl::{Error, Result};
use proptest::prelude::*;

type Mat4 = [[f64; 4]; 4];

/// Fourth-order central-difference Jacobian `J[i][k] = ∂_k X^i`.
fn jac<const N: usize>(f: &dyn Fn(&[f64; 4]) -> Result<[f64; N]>, x: &[f64; 4], h: f64) -> [[f64; 4]; N] {
    let mut j = [[0.0; 4]; N];
    for k in 0..4 {
        let at = |d: f64| {
            let mut y = *x;
            y[k] += d;
            f(&y).unwrap()
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        for i in 0..N {
            j[i][k] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
        }
    }
    j
}

/// Second-order variant, for the refinement test.
fn jac2<const N: usize>(f: &dyn Fn(&[f64; 4]) -> Result<[f64; N]>, x: &[f64; 4], h: f64) -> [[f64; 4]; N] {
    let mut j = [[0.0; 4]; N];
    for k in 0..4 {
        let (mut p, mut m) = (*x, *x);
        p[k] += h;
        m[k] -= h;
        let (fp, fm) = (f(&p).unwrap(), f(&m).unwrap());
        for i in 0..N {
            j[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j
}

/// `Jᵀ η J` for a diagonal target metric.
fn pullback<const N: usize>(j: &[[f64; 4]; N], eta: &[[f64; N]; N]) -> Mat4 {
    let mut g = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for i in 0..N {
                for k in 0..N {
                    g[a][b] += j[i][a] * eta[i][k] * j[k][b];
                }
            }
        }
    }
    g
}

fn max_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            m = m.max((a[i][k] - b[i][k]).abs());
        }
    }
    m
}

fn minkowski5() -> [[f64; 5]; 5] {
    let mut e = [[0.0; 5]; 5];
    e[0][0] = -1.0;
    for (i, row) in e.iter_mut().enumerate().skip(1) {
        row[i] = 1.0;
    }
    e
}

fn stereo_map(x: &[f64; 4]) -> Result<[f64; 5]> {
    Ok(embed_stereographic(x[0], [x[1], x[2], x[3]])?.as_array())
}

fn static_map(x: &[f64; 4]) -> Result<[f64; 5]> {
    Ok(static_embed(x[0], x[1], x[2], x[3])?.as_array())
}

fn dn_map(x: &[f64; 4]) -> Result<[f64; 5]> {
    Ok(ds_double_null_embed(x[0], x[1], x[2], x[3])?.as_array())
}

#[test]
fn stereographic_embedding_examples() {
    let close = |p: AmbientPoint5<f64>, q: [f64; 5]| p.as_array().iter().zip(q).all(|(a, b)| (a - b).abs() < 1e-15);
    assert!(close(embed_stereographic(0.0, [0.0; 3]).unwrap(), [0.0, 1.0, 0.0, 0.0, 0.0]));
    assert!(close(embed_stereographic(0.0, [2.0, 0.0, 0.0]).unwrap(), [0.0, 0.0, 1.0, 0.0, 0.0]));
    let p = embed_stereographic(1.0, [0.0; 3]).unwrap();
    assert!(close(p, [4.0 / 3.0, 5.0 / 3.0, 0.0, 0.0, 0.0]));
    assert!(p.on_hyperboloid(1e-14));
    assert!(matches!(embed_stereographic(2.0, [0.0; 3]), Err(Error::Domain(_))));
}

#[test]
fn stereographic_conformal_factor() {
    let g = stereographic_metric(0.0, [0.0; 3]).unwrap();
    assert_eq!(g.g[0][0], -1.0);
    assert_eq!(g.g[3][3], 1.0);
    let g = stereographic_metric(0.0f64, [2.0, 0.0, 0.0]).unwrap();
    assert!((g.g[2][2] - 0.25).abs() < 1e-15 && (g.g[0][0] + 0.25).abs() < 1e-15);
    assert!(g.inverse_residual() < 1e-14);
    assert!(stereographic_metric(3.0, [0.0; 3]).is_err());
}

#[test]
fn stereographic_metric_is_ambient_pullback() {
    for x in [[0.0, 0.0, 0.0, 0.0], [0.5, 0.3, -0.7, 1.1], [-1.2, 2.0, 0.1, 0.4], [1.5, 0.0, 0.0, 0.2]] {
        let g = stereographic_metric(x[0], [x[1], x[2], x[3]]).unwrap().g;
        let pb = pullback(&jac(&stereo_map, &x, 1e-4), &minkowski5());
        assert!(max_diff(&g, &pb) < 1e-8, "{x:?}: {}", max_diff(&g, &pb));
    }
}

#[test]
fn pullback_error_is_second_order() {
    let x = [0.5, 0.3, -0.7, 1.1];
    let g = stereographic_metric(x[0], [x[1], x[2], x[3]]).unwrap().g;
    let e1 = max_diff(&g, &pullback(&jac2(&stereo_map, &x, 2e-2), &minkowski5()));
    let e2 = max_diff(&g, &pullback(&jac2(&stereo_map, &x, 1e-2), &minkowski5()));
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn static_coordinate_examples() {
    assert_eq!(static_coords(&AmbientPoint5::new(0.0, 1.0, 0.0, 0.0, 0.0)).unwrap(), (0.0, 0.0));
    let (tp, r) = static_coords(&AmbientPoint5::new(4.0 / 3.0, 5.0 / 3.0, 0.0, 0.0, 0.0)).unwrap();
    assert!((tp - 3f64.ln()).abs() < 1e-14 && r == 0.0);
    assert!(matches!(static_coords(&AmbientPoint5::new(1.0, 0.5, 0.0, 0.0, 0.0)), Err(Error::Domain(_))));
    assert!(static_embed(0.0, 1.0, 0.0, 0.0).is_err());
}

#[test]
fn static_metric_is_ambient_pullback_and_round_trips() {
    for x in [[0.0, 0.3, 1.0, 0.5], [1.2, 0.7, 2.2, -1.0], [-0.8, 0.95, 0.4, 3.0]] {
        let g = static_metric(x[1], x[2]).unwrap().g;
        let pb = pullback(&jac(&static_map, &x, 1e-4), &minkowski5());
        assert!(max_diff(&g, &pb) < 1e-8, "{x:?}: {}", max_diff(&g, &pb));
        let p = static_embed(x[0], x[1], x[2], x[3]).unwrap();
        assert!(p.on_hyperboloid(1e-14));
        let (tp, r) = static_coords(&p).unwrap();
        assert!((tp - x[0]).abs() < 1e-12 && (r - x[1]).abs() < 1e-14);
    }
}

#[test]
fn optical_functions_on_the_cone() {
    // C₀ = {x = 1, t = |x′|}: u* = 0 and v* = log((t − 1)/(t + 1))
    for (t, dir) in [(2.0f64, [1.0, 0.0, 0.0]), (3.5, [0.0, 0.6, 0.8]), (1.2, [0.0, 0.0, -1.0])] {
        let p = AmbientPoint5::new(t, 1.0, t * dir[0], t * dir[1], t * dir[2]);
        assert!(p.on_hyperboloid(1e-13));
        let (us, vs) = ds_optical(&p).unwrap();
        assert!(us.abs() < 1e-14);
        assert!((vs - ((t - 1.0) / (t + 1.0)).ln()).abs() < 1e-13);
    }
    let (_, vs) = ds_optical(&AmbientPoint5::new(2.0, 1.0, 2.0, 0.0, 0.0)).unwrap();
    assert!((vs + 3f64.ln()).abs() < 1e-14);
    assert!(ds_optical(&AmbientPoint5::new(1.0, 1.0, 1.0, 0.0, 0.0)).is_err());
}

/// Deterministic scatter of stereographic chart points away from the horizons.
fn stereo_samples() -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let u = -1.4 + 0.3 * i as f64 + 0.01 * k as f64;
                let y = [-1.5 + 0.33 * j as f64, 0.2 * k as f64 - 0.9, 0.05 * (i + j) as f64];
                out.push([u, y[0], y[1], y[2]]);
            }
        }
    }
    out
}

#[test]
fn optical_level_sets_are_null() {
    let mut used = 0;
    for x in stereo_samples() {
        let Ok(p) = embed_stereographic(x[0], [x[1], x[2], x[3]]) else { continue };
        let r = p.radius();
        if (r - 1.0).abs() < 0.05 || (p.x - p.t).abs() < 0.05 || (p.x + p.t).abs() < 0.05 {
            continue;
        }
        let ginv = stereographic_metric(x[0], [x[1], x[2], x[3]]).unwrap().ginv;
        for which in 0..2 {
            let f = |y: &[f64; 4]| -> Result<[f64; 1]> {
                let o = ds_optical(&embed_stereographic(y[0], [y[1], y[2], y[3]])?)?;
                Ok([if which == 0 { o.0 } else { o.1 }])
            };
            let d = jac(&f, &x, 1e-4)[0];
            let mut res = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    res += ginv[a][b] * d[a] * d[b];
                }
            }
            assert!(res.abs() < 1e-8, "{x:?} {which}: {res}");
        }
        used += 1;
    }
    assert!(used >= 500, "{used}");
}

#[test]
fn double_null_metric_is_ambient_pullback() {
    for x in [[0.0, -1.0, 1.0, 0.3], [0.4, -0.9, 2.0, -1.0], [-0.5, -0.1, 0.6, 2.2]] {
        let g = ds_double_null_metric(x[0], x[1], x[2]).unwrap().g;
        let pb = pullback(&jac(&dn_map, &x, 1e-4), &minkowski5());
        let scale = g.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(max_diff(&g, &pb) < 1e-8 * scale, "{x:?}: {}", max_diff(&g, &pb));
    }
}

#[test]
fn area_radius_matches_ambient_radius() {
    let grid = SphereGrid::new(16, 32).unwrap();
    for (u, v) in [(0.0f64, -1.0), (0.3, -0.5), (-1.0, 0.2)] {
        let r = ds_radius(u, v).unwrap();
        let p = ds_double_null_embed(u, v, 0.8, 1.3).unwrap();
        assert!((p.radius() - r).abs() < 1e-12 * r);
        // induced metric from the ambient pullback, angular block
        let gs = |th: f64, ph: f64| -> Result<[[f64; 2]; 2]> {
            let g = pullback(&jac(&dn_map, &[u, v, th, ph], 1e-6), &minkowski5());
            Ok([[g[2][2], g[2][3]], [g[3][2], g[3][3]]])
        };
        let ra = area_radius(&gs, &grid).unwrap();
        assert!((ra - r).abs() < 1e-7 * r, "{ra} vs {r}");
    }
}

#[test]
fn rotated_optical_function_reduces_at_zero_angle() {
    for (u, v, th) in [(0.0f64, -0.3, 0.2), (0.4, -1.1, 2.5), (-0.2, 0.1, 1.0)] {
        let vp = ellipsoid_vphi(u, v, th, 0.0).unwrap();
        assert!((vp - (-2.0 * v).exp()).abs() < 1e-13 * vp, "{vp}");
        assert!((ellipsoid_vstar_phi(u, v, th, 0.0).unwrap() - v).abs() < 1e-13);
    }
}

#[test]
fn rotated_level_sets_are_null() {
    for &phi in &[0.05, 0.1, 0.3] {
        for &(u, v, th) in &[(0.0, -0.25, 0.3), (0.2, -0.8, 1.4), (-0.3, -0.5, 2.7), (0.1, -1.5, 0.9)] {
            let x = [u, v, th, 0.4];
            let ginv = ds_double_null_metric(u, v, th).unwrap().ginv;
            let f = |y: &[f64; 4]| -> Result<[f64; 1]> { Ok([ellipsoid_vstar_phi(y[0], y[1], y[2], phi)?]) };
            let d = jac(&f, &x, 1e-4)[0];
            let mut res = 0.0;
            let mut scale = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    res += ginv[a][b] * d[a] * d[b];
                    scale += (ginv[a][b] * d[a] * d[b]).abs();
                }
            }
            assert!(res.abs() < 1e-6 * scale.max(1.0), "phi {phi} {x:?}: {res}");
        }
    }
}

#[test]
fn ellipsoid_section_values() {
    let round = ellipsoid_section(0.2, 0.0);
    for th in [0.0, 1.0, 2.0, std::f64::consts::PI] {
        assert!((round.r(th) - 10.0).abs() < 1e-13);
    }
    let s = ellipsoid_section(0.2, 0.1);
    assert!((s.r(std::f64::consts::FRAC_PI_2) - 10.0).abs() < 1e-12);
    assert!((s.r(0.0) - 2.0 / (0.2 + 0.1 / 1.2)).abs() < 1e-13);
    assert!((s.r(0.0) - 7.0588).abs() < 1e-4);
    assert!(s.contained() && !s.touches_infinity());
    let edge = ellipsoid_section(0.1, 0.1);
    assert!(edge.touches_infinity() && edge.contained());
    assert!(!ellipsoid_section(0.05, 0.1).contained());
    assert!(ellipsoid_section(0.05, 0.1).area().is_err());
}

#[test]
fn small_angle_section_error_is_quadratic() {
    // exact level set against the closed form; halving (ε, φ) quarters the gap
    let gap = |eps: f64, phi: f64| {
        let s = ellipsoid_section(eps, phi);
        (0..=20)
            .map(|i| {
                let th = std::f64::consts::PI * i as f64 / 20.0;
                (s.vstar_exact(th).unwrap() - s.vstar(th)).abs()
            })
            .fold(0.0f64, f64::max)
    };
    let g1 = gap(0.2, 0.1);
    let g2 = gap(0.1, 0.05);
    assert!(g1 < 0.2 * 0.1 + 0.1 * 0.1, "{g1}");
    assert!((3.0..5.0).contains(&(g1 / g2)), "{g1} {g2}");
    // the exact level set lies on the rotated cone
    let s = ellipsoid_section(0.2, 0.1);
    let v = s.vstar_exact(0.7).unwrap();
    assert!((ellipsoid_vstar_phi(0.0f64, v, 0.7, 0.1).unwrap() + 0.2).abs() < 1e-12);
}

/// Bisection on `r³ − r + 0.2` (Λ = 3, m = 0.1).
fn cubic_root(mut lo: f64, mut hi: f64) -> f64 {
    let f = |r: f64| r * r * r - r + 0.2;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f(lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn horizons_match_bisection_oracle() {
    let p = SdSParams::new(3.0f64, 0.1).unwrap();
    let (rb, rh, rc) = sds_horizons(&p).unwrap();
    assert!((rh - cubic_root(0.0, 0.5)).abs() < 1e-12);
    assert!((rc - cubic_root(0.5, 1.0)).abs() < 1e-12);
    assert!((rb - cubic_root(-2.0, 0.0)).abs() < 1e-12);
    assert!((rh - 0.209).abs() < 1e-3 && (rc - 0.879).abs() < 1e-3);
    assert!(rb < 0.0 && 0.0 < rh && rh < rc);
    assert!(vieta_residuals(&p, (rb, rh, rc)).iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn mass_bound_enforced() {
    let bound = 1.0 / (3.0 * 3f64.sqrt());
    assert!(matches!(SdSParams::new(3.0f64, bound), Err(Error::NoHorizon { .. })));
    assert!(SdSParams::new(3.0f64, bound * 0.999).is_ok());
    assert!(SdSParams::new(-1.0f64, 0.1).is_err());
}

/// `∫_r^∞ dr/F` by Simpson in `t = 1/r`, where the integrand is smooth.
fn rstar_oracle(lambda: f64, m: f64, r: f64) -> f64 {
    let g = |t: f64| 1.0 / (lambda / 3.0 + 2.0 * m * t * t * t - t * t);
    let n = 4000;
    let h = 1.0 / (r * n as f64);
    let mut s = g(0.0) + g(1.0 / r);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    -s * h / 3.0
}

#[test]
fn tortoise_coordinate_examples() {
    let ds = SdSParams::new(3.0f64, 0.0).unwrap();
    assert!((sds_rstar(&ds, 2.0).unwrap() + 0.5 * 3f64.ln()).abs() < 1e-14);
    let p = SdSParams::new(3.0f64, 0.1).unwrap();
    for r in [2.0, 5.0, 30.0, 1e3] {
        let want = rstar_oracle(3.0, 0.1, r);
        assert!((sds_rstar(&p, r).unwrap() - want).abs() < 1e-10 * want.abs().max(1e-3), "{r}");
    }
    let far = sds_rstar(&p, 1e12).unwrap();
    assert!(far < 0.0 && far > -1e-11);
    assert!(matches!(sds_rstar(&p, 0.5), Err(Error::Domain(_))));
}

#[test]
fn tortoise_round_trip() {
    let p = SdSParams::new(3.0f64, 0.1).unwrap();
    let geo = SdsGeometry::new(p).unwrap();
    let (lo, hi) = ((geo.r_c + 0.1).ln(), 1e6f64.ln());
    for i in 0..100 {
        let r = (lo + (hi - lo) * i as f64 / 99.0).exp();
        let back = sds_r_of_rstar(&p, sds_rstar(&p, r).unwrap()).unwrap();
        assert!((back - r).abs() < 1e-10 * r, "{r}: {back}");
    }
}

#[test]
fn ef_lapse_example() {
    let p = SdSParams::new(3.0f64, 0.1).unwrap();
    let rs = sds_rstar(&p, 10.0).unwrap();
    let pt = ChartPoint { tag: ChartTag::EF, coords: [0.3, rs - 0.3, 1.0, 0.0] };
    let (m, om, dr) = sds_chart(SdsGauge::EF, &p, &pt).unwrap();
    assert!((om * om - 99.02).abs() < 1e-9);
    assert!((m.g[0][1] + 2.0 * 99.02).abs() < 1e-8);
    assert!((dr.0 - 99.02).abs() < 1e-9 && (dr.1 - 99.02).abs() < 1e-9);
    let wrong = ChartPoint { tag: ChartTag::Kruskal, ..pt };
    assert!(sds_chart(SdsGauge::EF, &p, &wrong).is_err());
}

#[test]
fn ef_guard_near_horizon() {
    let geo = SdsGeometry::new(SdSParams::new(3.0f64, 0.1).unwrap()).unwrap();
    let rs = geo.rstar(geo.r_c * (1.0 + 1e-13)).unwrap();
    assert!(matches!(geo.spherical(SdsGauge::EF, rs, 0.0), Err(Error::HorizonProximity(_))));
}

#[test]
fn kruskal_lapse_asymptotics() {
    let geo = SdsGeometry::new(SdSParams::new(3.0f64, 0.1).unwrap()).unwrap();
    assert!((geo.alpha_h + geo.alpha_bar - 1.0).abs() < 1e-15);
    let r = 1e4f64;
    let lim = 0.25 / (geo.kappa * geo.kappa) * r * r;
    assert!(((geo.omega_k2(r) - lim) / lim).abs() < 10.0 / r);
}

#[test]
fn sds_gauges_are_ef_pullbacks() {
    let geo = SdsGeometry::new(SdSParams::new(3.0f64, 0.1).unwrap()).unwrap();
    let rs = geo.rstar(8.0).unwrap();
    for gauge in [SdsGauge::Kruskal, SdsGauge::InitialData] {
        for (us, th) in [(0.4, 0.9), (-0.3, 2.0), (0.05, 1.3)] {
            let x = [us, rs - us, th, 0.5];
            let g_ef = geo.metric(SdsGauge::EF, &x).unwrap().g;
            let map = |y: &[f64; 4]| -> Result<[f64; 4]> {
                let (a, b) = geo.from_ef(gauge, y[0], y[1]);
                Ok([a, b, y[2], y[3]])
            };
            let j = jac(&map, &x, 1e-4);
            let y = map(&x).unwrap();
            let back = geo.to_ef(gauge, y[0], y[1]).unwrap();
            assert!((back.0 - us).abs() < 1e-12 && (back.1 - x[1]).abs() < 1e-12);
            let gk = geo.metric(gauge, &y).unwrap().g;
            let mut pb = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    for i in 0..4 {
                        for k in 0..4 {
                            pb[a][b] += j[i][a] * gk[i][k] * j[k][b];
                        }
                    }
                }
            }
            let scale = g_ef.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(max_diff(&g_ef, &pb) < 1e-8 * scale, "{gauge:?} {x:?}: {}", max_diff(&g_ef, &pb));
        }
    }
}

#[test]
fn chart_metric_dispatch() {
    let p = SdSParams::new(3.0f64, 0.1).unwrap();
    let pt = ChartPoint { tag: ChartTag::Static, coords: [0.0, 0.5, 1.0, 0.0] };
    assert!(chart_metric(&pt, None).is_ok());
    let ef = ChartPoint { tag: ChartTag::EF, coords: [0.0, -0.2, 1.0, 0.0] };
    assert!(matches!(chart_metric(&ef, None), Err(Error::Config(_))));
    assert!(chart_metric(&ef, Some(&p)).unwrap().inverse_residual() < 1e-12);
}

proptest! {
    #[test]
    fn vieta_identities_hold(lambda in 0.1..10.0f64, frac in 0.0..0.999f64) {
        let m = frac / (3.0 * lambda.sqrt());
        let p = SdSParams::new(lambda, m).unwrap();
        let roots = sds_horizons(&p).unwrap();
        let scale = 3.0 / lambda;
        for v in vieta_residuals(&p, roots) {
            prop_assert!(v.abs() < 1e-10 * scale.max(1.0));
        }
        prop_assert!(roots.0 < 0.0 && roots.1 >= 0.0 && roots.1 < roots.2);
        for r in [roots.1, roots.2] {
            prop_assert!(p.f(r).abs() < 1e-9 * (1.0 + p.lambda * r * r));
        }
    }

    #[test]
    fn stereographic_points_lie_on_hyperboloid(u in -1.9..1.9f64, y0 in -3.0..3.0f64, y1 in -3.0..3.0f64, y2 in -3.0..3.0f64) {
        let p = embed_stereographic(u, [y0, y1, y2]).unwrap();
        prop_assert!(p.hyperboloid_residual().abs() < 1e-12);
    }

    #[test]
    fn double_null_embedding_round_trips(u in -2.0..2.0f64, d in 0.05..3.0f64, th in 0.1..3.0f64, ph in 0.0..6.0f64) {
        let v = -u - d;
        let p = ds_double_null_embed(u, v, th, ph).unwrap();
        prop_assert!(p.hyperboloid_residual().abs() < 1e-9 * (1.0 + p.t * p.t));
        let (u2, v2) = ds_optical(&p).unwrap();
        prop_assert!((u2 - u).abs() < 1e-9 && (v2 - v).abs() < 1e-9);
    }
}
