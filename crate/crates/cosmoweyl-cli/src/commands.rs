use crate::config::{gauge_name, Config, Foliation};
use crate::output::{num, numeric_row, write_csv, Check, Outcome};
use anyhow::Result;
use cosmoweyl::analysis::{gauge_table, SphereGrid, GAUGE_TABLE_QUANTITIES};
use cosmoweyl::audit::{audit_foliation, ellipsoid_foliation, spherical_foliation};
use cosmoweyl::belrobinson::{flux_m_density, flux_null_density, flux_sigma_density};
use cosmoweyl::charts::{SdsGauge, SdsGeometry};
use cosmoweyl::nullframe::{StructureCoefficients, CSV_HEADER};
use cosmoweyl::weyl::{em_decompose, WeylNull, EM_CSV_HEADER, WEYL_CSV_HEADER};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

const GAUGES: [SdsGauge; 3] = [SdsGauge::EF, SdsGauge::Kruskal, SdsGauge::InitialData];

pub fn grid(cfg: &Config) -> Result<SphereGrid<f64>> {
    Ok(SphereGrid::new(cfg.n_theta, cfg.n_phi)?)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

// ----------------------------------------------------------------- table1

pub fn table1(cfg: &Config) -> Result<Outcome> {
    let geo = cfg.geometry()?;
    let entries = gauge_table(&geo, cfg.r, cfg.ustar, &grid(cfg)?)?;
    let per = entries.len() / GAUGES.len();
    let mut out = Outcome::default();
    for e in &entries {
        out.checks.push(Check::le(format!("table1/{}/{}", gauge_name(e.gauge), e.quantity), e.error, cfg.tol.table1));
    }
    let rows = (0..per).map(|i| {
        let mut row = vec![entries[i].quantity.to_string()];
        for g in 0..GAUGES.len() {
            let e = &entries[g * per + i];
            row.push(num(e.measured));
            row.push(num(e.expected));
        }
        row
    });
    let path = cfg.out_dir.join("table1.csv");
    write_csv(&path, &["quantity", "EF", "EF_expected", "Kruskal", "Kruskal_expected", "InitialData", "InitialData_expected"], rows)?;
    debug_assert_eq!(per, GAUGE_TABLE_QUANTITIES.len() + 2);
    out.outputs.push(path);
    Ok(out)
}

// ---------------------------------------------------------------- penrose

struct Curve {
    name: String,
    /// `(u*, v*, U, V)` with `U = atan u_K`, `V = atan v_K`.
    points: Vec<[f64; 4]>,
    /// Largest relative error of `r` recovered from `u_K v_K`.
    r_error: Option<f64>,
}

const PENROSE_RADII: [f64; 7] = [1.05, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0];
const PENROSE_SAMPLES: usize = 241;

fn level_curve(geo: &SdsGeometry<f64>, r: Option<f64>) -> Result<Curve> {
    let rs = match r {
        Some(r) => geo.rstar(r)?,
        None => 0.0,
    };
    let two_k = 2.0 * geo.kappa;
    let span = 12.0 / two_k;
    let mut points = Vec::with_capacity(PENROSE_SAMPLES);
    let mut r_error: f64 = 0.0;
    for t in linspace(-span, span, PENROSE_SAMPLES) {
        let (us, vs) = (0.5 * (rs + t), 0.5 * (rs - t));
        let (uk, vk) = geo.from_ef(SdsGauge::Kruskal, us, vs);
        if let Some(r) = r {
            let back = geo.r_of_kruskal_product(uk * vk)?;
            r_error = r_error.max(((back - r) / r).abs());
        }
        points.push([us, vs, uk.atan(), vk.atan()]);
    }
    let name = match r {
        Some(r) => format!("r={}", num(r)),
        None => "null_infinity".into(),
    };
    Ok(Curve { name, points, r_error: r.map(|_| r_error) })
}

fn horizon(geo: &SdsGeometry<f64>, outgoing: bool) -> Curve {
    let two_k = 2.0 * geo.kappa;
    let points = linspace(0.0, FRAC_PI_2, PENROSE_SAMPLES)
        .into_iter()
        .map(|a| {
            let s = a.tan().ln() / two_k;
            if outgoing {
                [f64::NEG_INFINITY, s, 0.0, a]
            } else {
                [s, f64::NEG_INFINITY, a, 0.0]
            }
        })
        .collect();
    let name = if outgoing { "horizon_u" } else { "horizon_v" };
    Curve { name: name.into(), points, r_error: None }
}

fn svg(curves: &[Curve]) -> String {
    let (w, h, pad) = (640.0, 360.0, 20.0);
    let scale = (w / 2.0 - pad) / FRAC_PI_2;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    for c in curves {
        let colour = if c.name.starts_with("horizon") {
            "black"
        } else if c.name == "null_infinity" {
            "red"
        } else {
            "steelblue"
        };
        let _ = write!(s, r#"<polyline data-curve="{}" fill="none" stroke="{colour}" stroke-width="1" points=""#, c.name);
        for p in &c.points {
            let (x, y) = (w / 2.0 + (p[3] - p[2]) * scale, h - pad - (p[2] + p[3]) * scale);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn penrose(cfg: &Config) -> Result<Outcome> {
    let geo = cfg.geometry()?;
    let radii: Vec<Option<f64>> = PENROSE_RADII.iter().map(|k| Some(k * geo.r_c)).chain([None]).collect();
    let mut curves = radii.par_iter().map(|&r| level_curve(&geo, r)).collect::<Result<Vec<_>>>()?;
    curves.push(horizon(&geo, true));
    curves.push(horizon(&geo, false));
    let mut out = Outcome::default();
    for c in &curves {
        if let Some(e) = c.r_error {
            out.checks.push(Check::le(format!("penrose/{}", c.name), e, cfg.tol.penrose));
        }
    }
    let csv_path = cfg.out_dir.join("penrose.csv");
    let rows = curves.iter().flat_map(|c| {
        c.points.iter().map(move |p| {
            let mut row = vec![c.name.clone()];
            row.extend(numeric_row(p));
            row
        })
    });
    write_csv(&csv_path, &["curve", "u_star", "v_star", "U", "V"], rows)?;
    let svg_path = cfg.out_dir.join("penrose.svg");
    std::fs::write(&svg_path, svg(&curves))?;
    out.outputs.extend([csv_path, svg_path]);
    Ok(out)
}

// ------------------------------------------------------------------ audit

pub fn audit(cfg: &Config) -> Result<Outcome> {
    let geo = cfg.geometry()?;
    let g = grid(cfg)?;
    let f = match cfg.foliation {
        Foliation::Sds => {
            let radii = logspace(cfg.r0, cfg.r1, 13);
            spherical_foliation(&geo, cfg.gauge, &radii, &[cfg.ustar - 0.5, cfg.ustar, cfg.ustar + 0.5], g)?
        }
        Foliation::Ellipsoid => ellipsoid_foliation(cfg.eps, cfg.phi, g)?,
    };
    let rep = audit_foliation(&f, cfg.eps0, cfg.c0)?;
    let mut out = Outcome::default();
    for e in &rep.assumptions {
        if let (Some(m), Some(h)) = (e.measured, e.holds) {
            out.checks.push(crate::output::Check { name: format!("audit/{}", e.name), value: m, threshold: e.threshold, pass: h });
        }
    }
    out.checks.push(Check::flag("audit/verdict", rep.verdict));
    let path = cfg.out_dir.join("audit.json");
    std::fs::write(&path, rep.to_json() + "\n")?;
    out.outputs.push(path);
    Ok(out)
}

// ------------------------------------------------------------------- dump

/// Spheres `u* = ustar`, `r` in `[r0, r1]` of the configured gauge.
fn sampled_coefficients(cfg: &Config) -> Result<Vec<(f64, StructureCoefficients<f64>)>> {
    let geo = cfg.geometry()?;
    linspace(cfg.r0, cfg.r1, cfg.n_r)
        .par_iter()
        .map(|&r| {
            let (u, v) = geo.from_ef(cfg.gauge, cfg.ustar, geo.rstar(r)? - cfg.ustar);
            Ok((r, StructureCoefficients::spherical(&geo.spherical(cfg.gauge, u, v)?)))
        })
        .collect()
}

pub fn dump_coeffs(cfg: &Config) -> Result<Outcome> {
    let rows = sampled_coefficients(cfg)?.into_iter().map(|(r, c)| numeric_row(&c.csv_row(r)));
    let path = cfg.out_dir.join("coeffs.csv");
    write_csv(&path, &CSV_HEADER, rows)?;
    Ok(Outcome { checks: vec![], outputs: vec![path] })
}

pub fn dump_weyl(cfg: &Config) -> Result<Outcome> {
    let p = cfg.params()?;
    let mut header = vec!["r"];
    header.extend(WEYL_CSV_HEADER);
    header.extend(EM_CSV_HEADER);
    let rows = linspace(cfg.r0, cfg.r1, cfg.n_r).into_iter().map(|r| {
        let w = WeylNull::only_rho(p.rho(r));
        let mut row = vec![r];
        row.extend(w.to_row());
        row.extend(em_decompose(&w, 1.0).to_row());
        numeric_row(&row)
    });
    let path = cfg.out_dir.join("weyl.csv");
    write_csv(&path, &header, rows)?;
    Ok(Outcome { checks: vec![], outputs: vec![path] })
}

pub fn dump_flux(cfg: &Config) -> Result<Outcome> {
    let p = cfg.params()?;
    let mut rows = Vec::new();
    for (r, c) in sampled_coefficients(cfg)? {
        let w = WeylNull::only_rho(p.rho(r));
        rows.push(numeric_row(&[
            r,
            flux_sigma_density(&w, 1.0, c.lapse)?.value,
            flux_m_density(&w, 1.0, c.lapse)?.value,
            flux_null_density(&w, c.lapse)?,
        ]));
    }
    let path = cfg.out_dir.join("flux.csv");
    write_csv(&path, &["r", "flux_sigma", "flux_m", "flux_null"], rows)?;
    Ok(Outcome { checks: vec![], outputs: vec![path] })
}
