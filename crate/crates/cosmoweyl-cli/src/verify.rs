use crate::commands::{grid, logspace};
use crate::config::{Config, Model};
use crate::output::{num, numeric_row, write_csv, Check, Outcome};
use anyhow::Result;
use cosmoweyl::analysis::{
    hodge_convergence, isoperimetric_check, null_sobolev_check, round_metric, sds_em_field, sds_slice_lapse, sds_slice_metric,
    sobolev_trace_check, Cylinder, CylinderField, EmField, InequalityReport, NullCone, Slicing, SphereGrid, HODGE_NAMES,
};
use cosmoweyl::belrobinson::{energy_closure, redshift_pointwise, ENERGY_CSV_HEADER};
use cosmoweyl::charts::{stereographic_metric, SdsGauge};
use cosmoweyl::decay::{gronwall_bound, solve_equality, DecayProblem};
use cosmoweyl::fd::riemann_fd;
use cosmoweyl::nullframe::{BoostLaw, NullFrame, StructureCoefficients};
use cosmoweyl::tensor::{inverse, max_abs_rank4};
use cosmoweyl::weyl::{null_decompose, to_frame, weyl_from_riemann, Weyl4, WeylNull, WEYL_CSV_HEADER};
use cosmoweyl::Error;
use rayon::prelude::*;

type Mat4 = [[f64; 4]; 4];

// ----------------------------------------------------------------- energy

pub fn energy(cfg: &Config) -> Result<Outcome> {
    let geo = cfg.geometry()?;
    let rows = energy_closure(&geo, cfg.r0, cfg.r1, cfg.n_r)?;
    let mut out = Outcome::default();
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.residual.abs()));
    out.checks.push(Check::le("energy/closure", worst, cfg.tol.energy));
    for r in logspace(cfg.r0, cfg.r1, 9) {
        let sd = geo.spherical(SdsGauge::EF, 0.0, geo.rstar(r)?)?;
        let c = StructureCoefficients::spherical(&sd);
        // measured acceleration constant of the foliation
        let eps = (2.0 * c.omega_hat - c.tr_chi()).abs() / c.tr_chi();
        let w = WeylNull::only_rho(geo.params.rho(r));
        let red = redshift_pointwise(&w, &c, &BoostLaw::constant(1.0), r, eps, 0.0)?;
        out.checks.push(Check::ge(format!("energy/redshift/r={}", num(r)), red.lhs - red.rhs, 0.0));
    }
    let path = cfg.out_dir.join("energy.csv");
    write_csv(&path, &ENERGY_CSV_HEADER, rows.iter().map(|r| numeric_row(&[r.r, r.flux, r.int_kplus, r.int_kminus, r.residual])))?;
    out.outputs.push(path);
    Ok(out)
}

// ------------------------------------------------------------------ decay

const DECAY_RATE: f64 = 6.0;

pub fn decay(cfg: &Config) -> Result<Outcome> {
    let r0 = cfg.r0;
    let k = |r: f64| DECAY_RATE - 1.0 / r;
    let zero = |_: f64| 0.0;
    let p = DecayProblem { kappa: &k, kappa0: k(r0), kappa1: DECAY_RATE, h: &zero, f0: 1.0, r0, c: 1.0 };
    let b = gronwall_bound(&p)?;
    let sol = solve_equality(&p, 1e3 * r0, 4000)?;
    let mut rows = Vec::new();
    let (mut worst, mut sup) = (0.0f64, 0.0f64);
    for &(r, f) in sol.iter().filter(|s| s.0 >= 2.0 * r0) {
        let bound = b.bound(r)?;
        worst = worst.max(f / bound);
        sup = sup.max(f * r.powf(DECAY_RATE));
        rows.push(numeric_row(&[r, f, bound]));
    }
    let mut out = Outcome::default();
    out.checks.push(Check::le("decay/bound_respected", worst, 1.0));
    out.checks.push(Check::le("decay/tight_within_slack", b.constant / sup, b.slack()));
    let slow = |r: f64| DECAY_RATE - 0.5 / (1.0 + r.ln());
    let divergent = DecayProblem { kappa: &slow, kappa0: DECAY_RATE - 0.5, kappa1: DECAY_RATE, h: &zero, f0: 1.0, r0: 1.0, c: 1.0 };
    out.checks.push(Check::flag("decay/divergent_weight_rejected", matches!(gronwall_bound(&divergent), Err(Error::DivergentWeight(_)))));
    let path = cfg.out_dir.join("decay.csv");
    write_csv(&path, &["r", "f", "bound"], rows)?;
    out.outputs.push(path);
    Ok(out)
}

// ---------------------------------------------------------------- sobolev

struct Estimate {
    name: &'static str,
    coarse: (f64, f64),
    fine: (f64, f64),
    /// Constant estimate with the field scaled by a constant factor.
    scaled: (f64, f64),
    grid: String,
}

impl Estimate {
    fn constant(p: (f64, f64)) -> f64 {
        p.0 / p.1
    }
}

fn unit_sphere(_: f64, t: f64, p: f64) -> cosmoweyl::Result<[[f64; 2]; 2]> {
    round_metric(1.0)(t, p)
}

fn trace_estimate(n_u: usize, g: SphereGrid<f64>, scale: f64) -> Result<(f64, f64, f64, f64)> {
    let lapse = |_: f64, _: f64, _: f64| Ok(1.0);
    let val = move |u: f64, t: f64, _: f64| Ok(scale * (1.0 + u) * (3.0 * t.cos().powi(2) - 1.0));
    let f = CylinderField { cylinder: Cylinder { u0: 0.0, u1: 1.0, n_u, sphere: &unit_sphere, lapse: &lapse, grid: g }, value: &val };
    let s = sobolev_trace_check(&f, 1e-5)?;
    Ok((s.l6_lhs, s.rhs, s.l4_sup_lhs, s.rhs))
}

pub fn sobolev(cfg: &Config) -> Result<Outcome> {
    let coarse = grid(cfg)?;
    let fine = coarse.refined()?;
    let mut est = Vec::new();

    let iso = |g: &SphereGrid<f64>, scale: f64| -> Result<(f64, f64)> {
        let phi = move |t: f64, _: f64| Ok(scale * t.cos());
        let r = isoperimetric_check(&phi, &round_metric(1.0), g, 1e-5)?;
        Ok((r.lhs, r.rhs))
    };
    est.push(Estimate { name: "isoperimetric", coarse: iso(&coarse, 1.0)?, fine: iso(&fine, 1.0)?, scaled: iso(&coarse, 7.5)?, grid: fine.describe() });

    let (a, b, c) = (trace_estimate(64, coarse.clone(), 1.0)?, trace_estimate(128, fine.clone(), 1.0)?, trace_estimate(64, coarse.clone(), 7.5)?);
    est.push(Estimate { name: "trace_l6", coarse: (a.0, a.1), fine: (b.0, b.1), scaled: (c.0, c.1), grid: fine.describe() });
    est.push(Estimate { name: "trace_l4_sup", coarse: (a.2, a.3), fine: (b.2, b.3), scaled: (c.2, c.3), grid: fine.describe() });

    let geo = cfg.geometry()?;
    let (v0, v1) = (geo.rstar(cfg.r0)?, geo.rstar(cfg.r1)?);
    let radius = |v: f64| Ok(geo.spherical(SdsGauge::EF, 0.0, v)?.r);
    let lapse = |v: f64| Ok(geo.spherical(SdsGauge::EF, 0.0, v)?.omega);
    let tr_chi = |v: f64| Ok(StructureCoefficients::spherical(&geo.spherical(SdsGauge::EF, 0.0, v)?).tr_chi());
    let cone = |n_v: usize, g: SphereGrid<f64>, scale: f64| -> Result<[(f64, f64); 3]> {
        let c = NullCone { v0, v1, n_v, radius: &radius, lapse: &lapse, tr_chi: &tr_chi, grid: g };
        let th = move |v: f64, t: f64, p: f64| Ok(scale * (1.0 + 0.5 * v.sin()) * t.sin() * p.cos());
        let s = null_sobolev_check(&c, &th, 1e-5)?;
        Ok([s.four, s.sup, s.six])
    };
    let (a, b, c) = (cone(256, coarse.clone(), 1.0)?, cone(512, fine.clone(), 1.0)?, cone(256, coarse.clone(), 3.0)?);
    for (i, name) in ["null_l4", "null_sup_l4", "null_l6"].into_iter().enumerate() {
        est.push(Estimate { name, coarse: a[i], fine: b[i], scaled: c[i], grid: fine.describe() });
    }

    let mut out = Outcome::default();
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for e in &est {
        let (c0, c1, cs) = (Estimate::constant(e.coarse), Estimate::constant(e.fine), Estimate::constant(e.scaled));
        let change = ((c1 - c0) / c1).abs();
        let homog = ((cs - c0) / c0).abs();
        out.checks.push(Check::le(format!("sobolev/{}/refinement", e.name), change, cfg.tol.sobolev));
        out.checks.push(Check::le(format!("sobolev/{}/homogeneity", e.name), homog, 1e-12));
        out.checks.push(Check::flag(format!("sobolev/{}/finite_positive", e.name), c1.is_finite() && c1 > 0.0));
        reports.push(InequalityReport::from_refinement(e.name, e.grid.clone(), e.coarse, e.fine));
        let mut row = vec![e.name.to_string(), e.grid.clone()];
        row.extend(numeric_row(&[e.fine.0, e.fine.1, c1, change]));
        rows.push(row);
    }
    let csv_path = cfg.out_dir.join("sobolev.csv");
    write_csv(&csv_path, &["inequality", "grid", "lhs", "rhs", "constant_estimate", "refinement_change"], rows)?;
    let json_path = cfg.out_dir.join("sobolev.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&reports)? + "\n")?;
    out.outputs.extend([csv_path, json_path]);
    Ok(out)
}

// ------------------------------------------------------------------ hodge

const HODGE_STEP: f64 = 2e-3;

pub fn hodge(cfg: &Config) -> Result<Outcome> {
    let p = cfg.params()?;
    let ms = move |y: &[f64; 4]| sds_slice_metric(&p, y);
    let ls = move |y: &[f64; 4]| sds_slice_lapse(&p, y);
    let e = move |y: &[f64; 4]| Ok(sds_em_field(&p, y)?.0);
    let h = move |y: &[f64; 4]| Ok(sds_em_field(&p, y)?.1);
    let points = [[cfg.r0, 0.0, 1.0, 0.2], [0.5 * (cfg.r0 + cfg.r1), 1.5, 0.4, 2.0], [cfg.r1, -2.0, 2.5, 4.0]];
    let results = points
        .par_iter()
        .map(|x| {
            let sl = Slicing { metric: &ms, lapse: &ls };
            let em = EmField { e: &e, h: &h };
            Ok(hodge_convergence(&sl, &em, x, HODGE_STEP)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for (x, (a, b, order)) in points.iter().zip(&results) {
        let (aa, bb) = (a.as_array(), b.as_array());
        for (i, name) in HODGE_NAMES.iter().enumerate() {
            let tag = format!("hodge/{name}/r={}", num(x[0]));
            out.checks.push(Check::le(tag.clone(), bb[i], cfg.tol.hodge));
            // orders are meaningless once the residual sits at round-off
            if aa[i] > 1e-11 {
                out.checks.push(Check::le(format!("{tag}/order"), (order[i] - 2.0).abs(), 0.2));
            }
            let mut row = numeric_row(x);
            row.push(name.to_string());
            row.extend(numeric_row(&[aa[i], bb[i], order[i]]));
            rows.push(row);
        }
    }
    let path = cfg.out_dir.join("hodge.csv");
    write_csv(&path, &["r", "t", "theta1", "theta2", "equation", "residual_h", "residual_h2", "order"], rows)?;
    out.outputs.push(path);
    Ok(out)
}

// ------------------------------------------------------------------- weyl

const DS_POINTS: [[f64; 4]; 8] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.4, 0.3, -0.5, 1.0],
    [-1.0, 0.8, 0.2, 0.1],
    [1.2, 0.1, 0.2, -0.3],
    [0.5, -1.5, 0.7, 0.2],
    [-0.3, 0.0, 2.0, -1.0],
    [1.5, 1.0, 1.0, 1.0],
    [0.0, -0.6, -0.6, 0.6],
];

pub fn weyl(cfg: &Config) -> Result<Outcome> {
    match cfg.model {
        Model::DeSitter => weyl_de_sitter(cfg),
        Model::Sds => weyl_sds(cfg),
    }
}

fn weyl_de_sitter(cfg: &Config) -> Result<Outcome> {
    // the stereographic chart covers the unit hyperboloid; rescale to Λ
    let l2 = 3.0 / cfg.lambda;
    let metric = move |x: &[f64; 4]| -> cosmoweyl::Result<Mat4> {
        let g = stereographic_metric(x[0], [x[1], x[2], x[3]])?.g;
        Ok(g.map(|row| row.map(|v| l2 * v)))
    };
    let results = DS_POINTS
        .par_iter()
        .map(|x| {
            let (g, riem) = riemann_fd(&metric, x, 1e-5, 1e-4)?;
            let ginv = inverse(&g).ok_or(Error::DegenerateMetric("stereographic metric".into()))?;
            let w = weyl_from_riemann(&riem, &g, &ginv, cfg.lambda)?;
            Ok((max_abs_rank4(&w), max_abs_rank4(&riem)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for (x, (w, r)) in DS_POINTS.iter().zip(&results) {
        out.checks.push(Check::le(format!("weyl/de_sitter/{}", numeric_row(x).join(":")), w / r, cfg.tol.weyl));
        let mut row = x.to_vec();
        row.extend([*w, *r]);
        rows.push(numeric_row(&row));
    }
    let path = cfg.out_dir.join("weyl_check.csv");
    write_csv(&path, &["u", "y1", "y2", "y3", "max_abs_W", "max_abs_R"], rows)?;
    out.outputs.push(path);
    Ok(out)
}

fn weyl_sds(cfg: &Config) -> Result<Outcome> {
    let geo = cfg.geometry()?;
    let metric = |x: &[f64; 4]| Ok(geo.metric(SdsGauge::EF, x)?.g);
    let radii = [cfg.r0, 0.5 * (cfg.r0 + cfg.r1), cfg.r1];
    let results = radii
        .par_iter()
        .map(|&r| {
            let x = [0.2, geo.rstar(r)? - 0.2, 1.1, 0.6];
            let (g, riem) = riemann_fd(&metric, &x, 1e-6, 3e-5)?;
            let ginv = inverse(&g).ok_or(Error::DegenerateMetric("EF metric".into()))?;
            let w = weyl_from_riemann(&riem, &g, &ginv, cfg.lambda)?;
            let e = NullFrame::from_metric(&g)?.e;
            Ok(null_decompose(&Weyl4 { w: to_frame(&w, &e) }))
        })
        .collect::<Result<Vec<WeylNull<f64>>>>()?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for (&r, n) in radii.iter().zip(&results) {
        let exact = geo.params.rho(r);
        out.checks.push(Check::le(format!("weyl/sds/rho/r={}", num(r)), (n.rho - exact).abs(), cfg.tol.weyl));
        let other = n.to_row().iter().enumerate().filter(|(i, _)| *i != 4).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        out.checks.push(Check::le(format!("weyl/sds/non_rho/r={}", num(r)), other, cfg.tol.weyl));
        let mut row = vec![r];
        row.extend(n.to_row());
        row.push(exact);
        rows.push(numeric_row(&row));
    }
    let mut header = vec!["r"];
    header.extend(WEYL_CSV_HEADER);
    header.push("rho_exact");
    let path = cfg.out_dir.join("weyl_check.csv");
    write_csv(&path, &header, rows)?;
    out.outputs.push(path);
    Ok(out)
}
