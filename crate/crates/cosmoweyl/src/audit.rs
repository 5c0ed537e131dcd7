//! Bootstrap-assumption auditor.
//!
//! Every entry is a supremum over the quadrature nodes of the supplied
//! spheres, so it bounds the true supremum only up to grid resolution.
//! The grid is recorded in the report.

use crate::analysis::{area_radius, sphere_average, SphereGrid};
use crate::charts::{ds_radius, ellipsoid_section, ellipsoid_vstar_phi, SdsGauge, SdsGeometry};
use crate::fd;
use crate::nullframe::{ds_spherical_data, propagation_bound, FoliationChange, StructureCoefficients};
use crate::scalar::{lit, to_f64, Real};
use crate::tensor::{norm2_sq, sym2, vnorm_sq, Mat2, Vec2};
use crate::{Error, Result};
use serde::Serialize;

/// Derivatives of `log q` along `L = ∂_v + b·∂`, `L̄ = ∂_u` and the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDerivs<T> {
    pub d_logq: T,
    pub db_logq: T,
    pub slash_logq: Vec2<T>,
}

/// Coefficient data at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint<T> {
    pub coeffs: StructureCoefficients<T>,
    pub q_derivs: Option<QDerivs<T>>,
    /// Only `Ω`, the traces and the accelerations are meaningful; shears
    /// and torsions are left unaudited.
    pub traces_only: bool,
}

type PointFn<'a, T> = Box<dyn Fn(T, T) -> Result<AuditPoint<T>> + 'a>;
type MetricFn<'a, T> = Box<dyn Fn(T, T) -> Result<Mat2<T>> + 'a>;

/// One sphere `S_{u,v}` of the audited foliation.
pub struct SphereSample<'a, T> {
    pub label: String,
    pub metric: MetricFn<'a, T>,
    pub point: PointFn<'a, T>,
}

pub struct FoliationSample<'a, T> {
    pub name: String,
    pub spheres: Vec<SphereSample<'a, T>>,
    pub grid: SphereGrid<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub name: String,
    /// `None` when the foliation does not supply the required data.
    pub measured: Option<f64>,
    pub threshold: f64,
    pub holds: Option<bool>,
    /// Largest values of the individual terms entering `measured`.
    pub components: Vec<(String, f64)>,
}

impl AuditEntry {
    fn new(name: &str, measured: Option<f64>, threshold: f64, components: Vec<(String, f64)>) -> Self {
        Self { name: name.into(), measured, threshold, holds: measured.map(|m| m <= threshold), components }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub foliation: String,
    pub grid: String,
    pub assumptions: Vec<AuditEntry>,
    pub verdict: bool,
}

impl AuditReport {
    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.assumptions.iter().find(|e| e.name == name)
    }

    /// Appends the propagated acceleration bound of a foliation change.
    pub fn push_fragment<T: Real>(&mut self, g: &GaugePropagation<T>) {
        let excess = to_f64((g.lhs - g.rhs).max(g.lhs_bar - g.rhs_bar));
        self.assumptions.push(AuditEntry::new(
            "fragment",
            Some(excess),
            0.0,
            vec![
                ("lhs".into(), to_f64(g.lhs)),
                ("rhs".into(), to_f64(g.rhs)),
                ("lhs_bar".into(), to_f64(g.lhs_bar)),
                ("rhs_bar".into(), to_f64(g.rhs_bar)),
            ],
        ));
        self.verdict = verdict(&self.assumptions);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn verdict(entries: &[AuditEntry]) -> bool {
    entries.iter().all(|e| e.holds != Some(false))
}

/// Running supremum with named parts.
struct Sup {
    parts: Vec<(String, f64)>,
}

impl Sup {
    fn new(names: &[&str]) -> Self {
        Self { parts: names.iter().map(|n| (n.to_string(), f64::NEG_INFINITY)).collect() }
    }

    fn add<T: Real>(&mut self, vals: &[T]) {
        for (p, v) in self.parts.iter_mut().zip(vals) {
            p.1 = p.1.max(to_f64(*v));
        }
    }

    fn max(&self) -> f64 {
        self.parts.iter().fold(f64::NEG_INFINITY, |a, p| a.max(p.1))
    }

    fn finish(self, name: &str, threshold: f64, measured: bool) -> AuditEntry {
        if !measured {
            return AuditEntry::new(name, None, threshold, vec![]);
        }
        let m = self.max();
        AuditEntry::new(name, Some(m), threshold, self.parts)
    }
}

/// Measures BA:I.i–viii (with the ε-strengthened iv) and BA:III.i on every
/// sphere of `f`. Thresholds: `C₀` everywhere except BA:I.iii and
/// BA:I.iv_eps, which use `ε₀`; BA:I.i uses the smallest positive number.
pub fn audit_foliation<T: Real>(f: &FoliationSample<'_, T>, eps0: T, c0: T) -> Result<AuditReport> {
    let (e0, c) = (to_f64(eps0), to_f64(c0));
    let mut s_i = Sup::new(&["-trchi", "-trchib"]);
    let mut s_ii = Sup::new(&["outgoing", "incoming"]);
    let mut s_iii = Sup::new(&["Omega trchi", "Omega trchib"]);
    let mut s_iv = Sup::new(&["Omega|chihat|", "Omega|chibhat|", "Omega|zeta|"]);
    let mut s_iv_e = Sup::new(&["Omega|chihat|/trchi", "Omega|chibhat|/trchib"]);
    let mut s_v = Sup::new(&["|D log q|/trchi", "|Db log q|/trchib"]);
    let mut s_vi = Sup::new(&["Omega(|eta|+|etab|+|dlog q|)/(q trchib + trchi/q)"]);
    let mut s_vii = Sup::new(&["q trchib", "trchi/q"]);
    let mut s_viii = Sup::new(&["Omega|q trchib - trchi/q|/(q trchib + trchi/q)"]);
    let mut s_iii_omega = Sup::new(&["Omega/r", "r/Omega"]);
    let (mut have_shear, mut have_q) = (true, true);
    let two = lit::<T>(2.0);

    for s in &f.spheres {
        let gs = &*s.metric;
        let pt = &*s.point;
        let out = |t: T, p: T| -> Result<T> {
            let a = pt(t, p)?;
            Ok(a.coeffs.lapse * a.coeffs.tr_chi())
        };
        let inc = |t: T, p: T| -> Result<T> {
            let a = pt(t, p)?;
            Ok(a.coeffs.lapse * a.coeffs.tr_chib())
        };
        let avg = sphere_average(&out, gs, &f.grid)?;
        let avgb = sphere_average(&inc, gs, &f.grid)?;
        if !(avg > T::zero() && avgb > T::zero()) {
            return Err(Error::ExpansionSign(format!("non-positive average expansion on {}", s.label)));
        }
        let q = (avg / avgb).sqrt();
        let r = area_radius(gs, &f.grid)?;
        for node in f.grid.nodes() {
            let a = pt(node.theta, node.phi)?;
            let k = &a.coeffs;
            let om = k.lapse;
            let (tc, tcb) = (k.tr_chi(), k.tr_chib());
            s_i.add(&[-tc, -tcb]);
            s_ii.add(&[om * (two * k.omega_hat - tc).abs() / tc, om * (two * k.omegab_hat - tcb).abs() / tcb]);
            s_iii.add(&[(om * tc - avg).abs() / avg, (om * tcb - avgb).abs() / avgb]);
            let sum = q * tcb + tc / q;
            s_vii.add(&[q * tcb, tc / q]);
            s_viii.add(&[om * (q * tcb - tc / q).abs() / sum]);
            s_iii_omega.add(&[om / r, r / om]);
            have_shear &= !a.traces_only;
            if !a.traces_only {
                let (ch, chb) = (norm2_sq(&k.chi_hat()).sqrt(), norm2_sq(&k.chib_hat()).sqrt());
                s_iv.add(&[om * ch, om * chb, om * vnorm_sq(&k.zeta).sqrt()]);
                s_iv_e.add(&[om * ch / tc, om * chb / tcb]);
            }
            match a.q_derivs {
                Some(d) => {
                    s_v.add(&[d.d_logq.abs() / tc, d.db_logq.abs() / tcb]);
                    if !a.traces_only {
                        let n = vnorm_sq(&k.eta).sqrt() + vnorm_sq(&k.etab).sqrt() + vnorm_sq(&d.slash_logq).sqrt();
                        s_vi.add(&[om * n / sum]);
                    }
                }
                None => have_q = false,
            }
        }
    }
    let tiny = -f64::MIN_POSITIVE;
    let assumptions = vec![
        s_i.finish("BA:I.i", tiny, true),
        s_ii.finish("BA:I.ii", c, true),
        s_iii.finish("BA:I.iii", e0, true),
        s_iv.finish("BA:I.iv", c, have_shear),
        s_iv_e.finish("BA:I.iv_eps", e0, have_shear),
        s_v.finish("BA:I.v", c, have_q),
        s_vi.finish("BA:I.vi", c, have_q && have_shear),
        s_vii.finish("BA:I.vii", c, true),
        s_viii.finish("BA:I.viii", c, true),
        s_iii_omega.finish("BA:III.i", c, true),
    ];
    Ok(AuditReport { foliation: f.name.clone(), grid: f.grid.describe(), verdict: verdict(&assumptions), assumptions })
}

// ------------------------------------------------------------ foliations

/// Relative step for the derivatives of `log q` across spheres.
const Q_STEP: f64 = 1e-5;

fn spherical_point<T: Real>(geo: &SdsGeometry<T>, gauge: SdsGauge, u: T, v: T) -> Result<AuditPoint<T>> {
    let sd = geo.spherical(gauge, u, v)?;
    let coeffs = StructureCoefficients::spherical(&sd);
    let logq = |u: T, v: T| -> Result<T> {
        let s = geo.spherical(gauge, u, v)?;
        Ok(lit::<T>(0.5) * (s.dr_dv / s.dr_du).ln())
    };
    let rel = lit::<T>(Q_STEP);
    let d_logq = fd::derivative(|vv| logq(u, vv), v, rel)?;
    let db_logq = fd::derivative(|uu| logq(uu, v), u, rel)?;
    Ok(AuditPoint { coeffs, q_derivs: Some(QDerivs { d_logq, db_logq, slash_logq: [T::zero(); 2] }), traces_only: false })
}

/// Spheres of the spherical double-null foliation of Schwarzschild-de
/// Sitter in `gauge`, at area radii `radii`; each radius is sampled at the
/// Eddington-Finkelstein retarded times `offsets` (so `u* + v* = r*`).
pub fn spherical_foliation<'a, T: Real>(
    geo: &'a SdsGeometry<T>,
    gauge: SdsGauge,
    radii: &[T],
    offsets: &[T],
    grid: SphereGrid<T>,
) -> Result<FoliationSample<'a, T>> {
    let mut spheres = Vec::new();
    for &r in radii {
        let rs = geo.rstar(r)?;
        for &s in offsets {
            let (u, v) = geo.from_ef(gauge, s, rs - s);
            let p = spherical_point(geo, gauge, u, v)?;
            let rr = geo.spherical(gauge, u, v)?.r;
            spheres.push(SphereSample {
                label: format!("u={u:e} v={v:e}"),
                metric: Box::new(move |t: T, _| Ok(sym2(rr * rr, T::zero(), rr * rr * t.sin().powi(2)))),
                point: Box::new(move |_, _| Ok(p)),
            });
        }
    }
    let name = format!("sds-{} m={} lambda={}", format!("{gauge:?}").to_lowercase(), geo.params.m, geo.params.lambda);
    Ok(FoliationSample { name, spheres, grid })
}

/// The section `S_{0,ε}` of the rotated-cone foliation of de Sitter with
/// the small-angle forms `Ω ≃ r(θ)`, `trχ ≃ 2`, `trχ̄ ≃ 2 + 4φ cosθ / r`,
/// `ω̂ ≃ ω̄̂ ≃ 1`. Shears, torsion and `q` derivatives are not available
/// from these forms and are left unaudited.
pub fn ellipsoid_foliation<'a, T: Real>(eps: T, angle_phi: T, grid: SphereGrid<T>) -> Result<FoliationSample<'a, T>> {
    let sec = ellipsoid_section(eps, angle_phi);
    if !sec.contained() {
        return Err(Error::Domain(format!("section (eps, phi) = ({eps}, {angle_phi}) reaches infinity")));
    }
    let two = lit::<T>(2.0);
    let point = move |t: T, _: T| -> Result<AuditPoint<T>> {
        let r = sec.r(t);
        let tcb = two + lit::<T>(4.0) * angle_phi * t.cos() / r;
        let z = [T::zero(); 2];
        let coeffs = StructureCoefficients {
            lapse: r,
            shift: z,
            chi: sym2(T::one(), T::zero(), T::one()),
            chib: sym2(tcb / two, T::zero(), tcb / two),
            omega: r,
            omegab: r,
            omega_hat: T::one(),
            omegab_hat: T::one(),
            zeta: z,
            eta: z,
            etab: z,
            gauss_k: T::nan(),
        };
        Ok(AuditPoint { coeffs, q_derivs: None, traces_only: true })
    };
    let metric = move |t: T, _: T| {
        let r = sec.r(t);
        Ok(sym2(r * r, T::zero(), r * r * t.sin().powi(2)))
    };
    Ok(FoliationSample {
        name: format!("ellipsoid eps={eps} phi={angle_phi}"),
        spheres: vec![SphereSample { label: "S_{0,eps}".into(), metric: Box::new(metric), point: Box::new(point) }],
        grid,
    })
}

// ------------------------------------------------- gauge propagation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugePropagation<T> {
    pub lhs: T,
    pub rhs: T,
    pub lhs_bar: T,
    pub rhs_bar: T,
    /// `ε tr̃χ` followed by the six correction terms.
    pub terms: [T; 7],
    /// Index into `terms` of the largest contribution.
    pub dominant: usize,
    pub holds: bool,
}

/// Both sides of the propagated acceleration bound after the change `fc`.
pub fn audit_gauge_propagation<T: Real>(fc: &FoliationChange<T>, c: &StructureCoefficients<T>, eps: T) -> Result<GaugePropagation<T>> {
    let two = lit::<T>(2.0);
    let slack = T::one() + lit::<T>(1e-12);
    let (tc, tcb) = (c.tr_chi(), c.tr_chib());
    if (two * c.omega_hat - tc).abs() > eps * tc * slack || (two * c.omegab_hat - tcb).abs() > eps * tcb * slack {
        return Err(Error::Hypothesis(format!(
            "|2w - trchi| = {:e}, |2wb - trchib| = {:e} exceed eps trchi = {:e}, eps trchib = {:e}",
            (two * c.omega_hat - tc).abs(),
            (two * c.omegab_hat - tcb).abs(),
            eps * tc,
            eps * tcb
        )));
    }
    let b = propagation_bound(fc, c, eps)?;
    let lead = b.rhs - b.terms.iter().fold(T::zero(), |a, t| a + *t);
    let mut terms = [lead; 7];
    terms[1..].copy_from_slice(&b.terms);
    let dominant = (0..7).fold(0, |best, i| if terms[i] > terms[best] { i } else { best });
    let holds = b.lhs <= b.rhs * slack && b.lhs_bar <= b.rhs_bar * slack;
    Ok(GaugePropagation { lhs: b.lhs, rhs: b.rhs, lhs_bar: b.lhs_bar, rhs_bar: b.rhs_bar, terms, dominant, holds })
}

/// Retarded optical function of the cones rotated by `angle_phi`, obtained
/// from the advanced one by the reflection `u* ↔ v*`.
pub fn ds_rotated_ustar<T: Real>(ustar: T, vstar: T, theta1: T, angle_phi: T) -> Result<T> {
    ellipsoid_vstar_phi(vstar, ustar, theta1, angle_phi)
}

/// The change `ũ = u*_φ`, `ṽ = v*` on the de Sitter double-null chart at
/// `(u*, v*, θ¹)`, derivatives by central differences with step `rel`,
/// together with the coefficients of the original foliation there.
pub fn ds_rotated_change<T: Real>(
    ustar: T,
    vstar: T,
    theta1: T,
    angle_phi: T,
    rel: T,
) -> Result<(FoliationChange<T>, StructureCoefficients<T>)> {
    let c = StructureCoefficients::spherical(&ds_spherical_data(ustar, vstar)?);
    let r = ds_radius(ustar, vstar)?;
    let f = |x: &[T; 3]| ds_rotated_ustar(x[0], x[1], x[2], angle_phi);
    let x = [ustar, vstar, theta1];
    let d = fd::gradient(&f, &x, rel)?;
    let du = |y: &[T; 3]| -> Result<T> { Ok(fd::gradient(&f, y, rel)?[0]) };
    let dd = fd::gradient(&du, &x, rel)?;
    let dth = |y: &[T; 3]| -> Result<T> { Ok(y[2].sin() * fd::gradient(&f, y, rel)?[2]) };
    let lap = fd::gradient(&dth, &x, rel)?[2] / (r * r * theta1.sin());
    let fc = FoliationChange {
        lf: d[1],
        lbf: d[0],
        grad_f: [d[2] / r, T::zero()],
        lap_f: lap,
        lg: T::one(),
        lb_lbf: dd[0],
        l_p: dd[1],
        grad_p: [dd[2] / r, T::zero()],
    };
    Ok((fc, c))
}
