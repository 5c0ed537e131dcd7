//! Null frames and the connection coefficients of double-null foliations.
//!
//! Sphere tensors are stored in an orthonormal frame `(e1, e2)` obtained by
//! Gram–Schmidt from `(∂_θ¹, ∂_θ²)`, so that `g̸ = δ`.

use crate::charts::{ds_double_null_omega2, ds_radius, ChartPoint, ChartTag, SdSParams, SdsGauge, SdsGeometry, SphericalData};
use crate::error::{Error, Result};
use crate::fd;
use crate::scalar::{lit, Real};
use crate::tensor::{self, hat2, mscale, sym2, trace2, vadd, vdot, vnorm_sq, vscale, Mat2, Mat4, Vec2};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureCoefficients<T> {
    /// Null lapse Ω.
    pub lapse: T,
    pub shift: Vec2<T>,
    pub chi: Mat2<T>,
    pub chib: Mat2<T>,
    pub omega: T,
    pub omegab: T,
    pub omega_hat: T,
    pub omegab_hat: T,
    pub zeta: Vec2<T>,
    pub eta: Vec2<T>,
    pub etab: Vec2<T>,
    /// Gauss curvature of the sphere through the point.
    pub gauss_k: T,
}

impl<T: Real> StructureCoefficients<T> {
    /// Coefficients of a spherically symmetric chart with zero shift.
    pub fn spherical(sd: &SphericalData<T>) -> Self {
        let two = lit::<T>(2.0);
        let (r, om) = (sd.r, sd.omega);
        let trchi = two * sd.dr_dv / (om * r);
        let trchib = two * sd.dr_du / (om * r);
        let h = lit::<T>(0.5);
        let z = [T::zero(); 2];
        Self {
            lapse: om,
            shift: z,
            chi: sym2(h * trchi, T::zero(), h * trchi),
            chib: sym2(h * trchib, T::zero(), h * trchib),
            omega: sd.dlog_omega_dv,
            omegab: sd.dlog_omega_du,
            omega_hat: sd.dlog_omega_dv / om,
            omegab_hat: sd.dlog_omega_du / om,
            zeta: z,
            eta: z,
            etab: z,
            gauss_k: T::one() / (r * r),
        }
    }

    pub fn tr_chi(&self) -> T {
        trace2(&self.chi)
    }

    pub fn tr_chib(&self) -> T {
        trace2(&self.chib)
    }

    pub fn chi_hat(&self) -> Mat2<T> {
        hat2(&self.chi)
    }

    pub fn chib_hat(&self) -> Mat2<T> {
        hat2(&self.chib)
    }

    /// `d̸ log Ω = ½(η + η̄)`.
    pub fn dlog_lapse(&self) -> Vec2<T> {
        vscale(lit(0.5), &vadd(&self.eta, &self.etab))
    }

    /// Largest violation of the algebraic invariants of the record.
    pub fn invariant_residual(&self) -> T {
        let mut m = (self.omega_hat * self.lapse - self.omega).abs();
        m = m.max((self.omegab_hat * self.lapse - self.omegab).abs());
        m = m.max((self.chi[0][1] - self.chi[1][0]).abs());
        m = m.max((self.chib[0][1] - self.chib[1][0]).abs());
        let dl = self.dlog_lapse();
        for i in 0..2 {
            m = m.max((self.eta[i] - self.zeta[i] - dl[i]).abs());
            m = m.max((self.etab[i] + self.zeta[i] - dl[i]).abs());
        }
        m
    }

    /// Row `(r, Ω, trχ, trχ̄, ω̂, ω̄̂, |ζ|, |χ̂|, |χ̄̂|, K)`.
    pub fn csv_row(&self, r: T) -> [T; 10] {
        [
            r,
            self.lapse,
            self.tr_chi(),
            self.tr_chib(),
            self.omega_hat,
            self.omegab_hat,
            vnorm_sq(&self.zeta).sqrt(),
            tensor::norm2_sq(&self.chi_hat()).sqrt(),
            tensor::norm2_sq(&self.chib_hat()).sqrt(),
            self.gauss_k,
        ]
    }
}

pub const CSV_HEADER: [&str; 10] = ["r", "Omega", "trchi", "trchib", "omegahat", "omegabhat", "abs_zeta", "abs_chihat", "abs_chibhat", "K"];

/// Closed-form chart data of the spherical double-null chart of de Sitter.
pub fn ds_spherical_data<T: Real>(ustar: T, vstar: T) -> Result<SphericalData<T>> {
    let r = ds_radius(ustar, vstar)?;
    let om2 = ds_double_null_omega2(r);
    let dr = lit::<T>(2.0) * om2;
    let dl = r * lit(0.5);
    Ok(SphericalData { r, omega: om2.sqrt(), dr_du: dr, dr_dv: dr, dlog_omega_du: dl, dlog_omega_dv: dl })
}

/// Closed-form coefficients in the spherical double-null charts.
pub fn structure_coefficients<T: Real>(point: &ChartPoint<T>, params: Option<&SdSParams<T>>) -> Result<StructureCoefficients<T>> {
    let c = point.coords;
    let sd = match point.tag {
        ChartTag::DoubleNullDS => ds_spherical_data(c[0], c[1])?,
        ChartTag::EF | ChartTag::Kruskal | ChartTag::InitialData => {
            let p = params.ok_or_else(|| Error::Config("SdS coefficients need parameters".into()))?;
            let gauge = match point.tag {
                ChartTag::EF => SdsGauge::EF,
                ChartTag::Kruskal => SdsGauge::Kruskal,
                _ => SdsGauge::InitialData,
            };
            SdsGeometry::new(*p)?.spherical(gauge, c[0], c[1])?
        }
        tag => return Err(Error::Domain(format!("{tag:?} is not a double-null chart"))),
    };
    Ok(StructureCoefficients::spherical(&sd))
}

/// Frame of a double-null chart at a point, as coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullFrame<T> {
    /// `e1, e2, e3 = L̄̂, e4 = L̂`.
    pub e: [[T; 4]; 4],
    pub lapse: T,
    pub shift: Vec2<T>,
}

impl<T: Real> NullFrame<T> {
    /// Builds the normalised frame from the metric components.
    pub fn from_metric(g: &Mat4<T>) -> Result<Self> {
        let om2 = -g[0][1] * lit(0.5);
        if om2 <= T::zero() {
            return Err(Error::Frame("g_uv must be negative".into()));
        }
        let gs = [[g[2][2], g[2][3]], [g[3][2], g[3][3]]];
        let gsi = tensor::inverse(&gs).ok_or_else(|| Error::DegenerateMetric("sphere metric singular".into()))?;
        let b = [
            -(gsi[0][0] * g[1][2] + gsi[0][1] * g[1][3]),
            -(gsi[1][0] * g[1][2] + gsi[1][1] * g[1][3]),
        ];
        let om = om2.sqrt();
        let z = T::zero();
        let n1 = gs[0][0].sqrt();
        let e1 = [z, z, T::one() / n1, z];
        // e2 ∝ ∂_θ2 − (g_23/g_22) ∂_θ1
        let c = -gs[0][1] / gs[0][0];
        let n2 = (gs[1][1] + c * gs[0][1]).sqrt();
        let e2 = [z, z, c / n2, T::one() / n2];
        let e3 = [T::one() / om, z, z, z];
        let e4 = [z, T::one() / om, b[0] / om, b[1] / om];
        Ok(Self { e: [e1, e2, e3, e4], lapse: om, shift: b })
    }

    /// `max |g(e_a, e_b) − η_ab|` against the null frame metric.
    pub fn normalisation_residual(&self, g: &Mat4<T>) -> T {
        let eta = tensor::null_frame_metric::<T>();
        let mut m = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                m = m.max((tensor::bilinear(g, &self.e[a], &self.e[b]) - eta[a][b]).abs());
            }
        }
        m
    }
}

/// `g(∇_{X_A} V, X_B)` for a vector field `V` and tangent vectors `X_A`;
/// the generic second-fundamental-form routine.
pub fn second_form<T: Real, const K: usize>(
    metric: &dyn Fn(&[T; 4]) -> Result<Mat4<T>>,
    field: &dyn Fn(&[T; 4]) -> Result<[T; 4]>,
    basis: &[[T; 4]; K],
    x: &[T; 4],
    rel: T,
) -> Result<[[T; K]; K]> {
    let (g, _, gam) = fd::christoffel_fd(metric, x, rel)?;
    let dv = fd::covariant_vector(field, &gam, x, rel)?;
    let mut out = [[T::zero(); K]; K];
    for a in 0..K {
        let mut nab = [T::zero(); 4];
        for (m, item) in nab.iter_mut().enumerate() {
            for l in 0..4 {
                *item = *item + basis[a][l] * dv[l][m];
            }
        }
        for b in 0..K {
            out[a][b] = tensor::bilinear(&g, &nab, &basis[b]);
        }
    }
    Ok(out)
}

/// Coefficients of an arbitrary double-null chart `(u, v, θ¹, θ²)` from its
/// metric by central differences.
pub fn coefficients_from_metric<T: Real>(
    metric: &dyn Fn(&[T; 4]) -> Result<Mat4<T>>,
    x: &[T; 4],
    rel: T,
) -> Result<StructureCoefficients<T>> {
    let (g, _, gam) = fd::christoffel_fd(metric, x, rel)?;
    let frame = NullFrame::from_metric(&g)?;
    let frame_at = |y: &[T; 4]| -> Result<NullFrame<T>> { NullFrame::from_metric(&metric(y)?) };
    let e4f = |y: &[T; 4]| -> Result<[T; 4]> { Ok(frame_at(y)?.e[3]) };
    let e3f = |y: &[T; 4]| -> Result<[T; 4]> { Ok(frame_at(y)?.e[2]) };
    let d4 = fd::covariant_vector(&e4f, &gam, x, rel)?;
    let d3 = fd::covariant_vector(&e3f, &gam, x, rel)?;
    let along = |d: &Mat4<T>, xv: &[T; 4]| -> [T; 4] {
        let mut out = [T::zero(); 4];
        for (m, o) in out.iter_mut().enumerate() {
            for l in 0..4 {
                *o = *o + xv[l] * d[l][m];
            }
        }
        out
    };
    let e = frame.e;
    let mut chi = [[T::zero(); 2]; 2];
    let mut chib = [[T::zero(); 2]; 2];
    let mut zeta = [T::zero(); 2];
    for a in 0..2 {
        let n4 = along(&d4, &e[a]);
        let n3 = along(&d3, &e[a]);
        for b in 0..2 {
            chi[a][b] = tensor::bilinear(&g, &n4, &e[b]);
            chib[a][b] = tensor::bilinear(&g, &n3, &e[b]);
        }
        zeta[a] = lit::<T>(0.5) * tensor::bilinear(&g, &n4, &e[2]);
    }
    let logom = |y: &[T; 4]| -> Result<T> { Ok((-metric(y)?[0][1] * lit(0.5)).ln() * lit(0.5)) };
    let dlo = fd::gradient(&logom, x, rel)?;
    let b = frame.shift;
    let omega = dlo[1] + b[0] * dlo[2] + b[1] * dlo[3];
    let omegab = dlo[0];
    let dl = [vdot4(&e[0], &dlo), vdot4(&e[1], &dlo)];
    let eta = vadd(&zeta, &dl);
    let etab = vadd(&vscale(-T::one(), &zeta), &dl);
    let gauss_k = sphere_gauss_curvature(metric, x, rel)?;
    let om = frame.lapse;
    Ok(StructureCoefficients {
        lapse: om,
        shift: b,
        chi,
        chib,
        omega,
        omegab,
        omega_hat: omega / om,
        omegab_hat: omegab / om,
        zeta,
        eta,
        etab,
        gauss_k,
    })
}

fn vdot4<T: Real>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Gauss curvature of the induced metric on the sphere through `x`.
pub fn sphere_gauss_curvature<T: Real>(metric: &dyn Fn(&[T; 4]) -> Result<Mat4<T>>, x: &[T; 4], rel: T) -> Result<T> {
    let (u, v) = (x[0], x[1]);
    let gs = |y: &[T; 2]| -> Result<[[T; 2]; 2]> {
        let g = metric(&[u, v, y[0], y[1]])?;
        Ok([[g[2][2], g[2][3]], [g[3][2], g[3][3]]])
    };
    let rel2 = rel * lit::<T>(10.0);
    let (g0, r) = fd::riemann_fd(&gs, &[x[2], x[3]], rel, rel2)?;
    Ok(r[0][1][0][1] / tensor::det(&g0))
}

/// `g^{μν} ∂_μ f ∂_ν f`, zero exactly when the level sets of `f` are null.
pub fn eikonal_residual_metric<T: Real>(ginv: &Mat4<T>, df: &[T; 4]) -> T {
    tensor::bilinear(ginv, df, df)
}

/// A change of foliation `ũ = f`, `ṽ = g`, described by the derivatives of
/// `f` and `g` at one point in the original frame (`L = ∂_v + b·∂`,
/// `L̄ = ∂_u`; angular quantities in the orthonormal sphere frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationChange<T> {
    /// `Lf`
    pub lf: T,
    /// `L̄f`
    pub lbf: T,
    /// `∇̸f`
    pub grad_f: Vec2<T>,
    /// `△̸f`
    pub lap_f: T,
    /// `Lg`
    pub lg: T,
    /// `L̄(L̄f)`
    pub lb_lbf: T,
    /// `L(L̄f · Lg)`
    pub l_p: T,
    /// `∇̸(L̄f · Lg)`
    pub grad_p: Vec2<T>,
}

impl<T: Real> FoliationChange<T> {
    pub fn identity() -> Self {
        let z = [T::zero(); 2];
        Self { lf: T::zero(), lbf: T::one(), grad_f: z, lap_f: T::zero(), lg: T::one(), lb_lbf: T::zero(), l_p: T::zero(), grad_p: z }
    }

    /// `P = L̄f · Lg`.
    pub fn p(&self) -> T {
        self.lbf * self.lg
    }

    fn check(&self) -> Result<()> {
        if self.lbf <= T::zero() {
            return Err(Error::Positivity(format!("Lbar f = {:e} must be positive", self.lbf)));
        }
        if self.lg <= T::zero() {
            return Err(Error::Positivity(format!("L g = {:e} must be positive", self.lg)));
        }
        Ok(())
    }
}

/// `L̄f(Lf) − Ω²|∇̸f|²`; vanishes iff the level sets of `f` are null.
pub fn eikonal_condition_residual<T: Real>(fc: &FoliationChange<T>, coeffs: &StructureCoefficients<T>) -> T {
    fc.lbf * fc.lf - coeffs.lapse * coeffs.lapse * vnorm_sq(&fc.grad_f)
}

/// Traces and accelerations of the transformed foliation; these are the
/// quantities the transformation law determines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoliationCoefficients<T> {
    pub lapse: T,
    pub tr_chi: T,
    pub tr_chib: T,
    pub omega_hat: T,
    pub omegab_hat: T,
    pub omega: T,
    pub omegab: T,
}

pub fn transform_foliation<T: Real>(fc: &FoliationChange<T>, c: &StructureCoefficients<T>) -> Result<FoliationCoefficients<T>> {
    fc.check()?;
    let (h, two) = (lit::<T>(0.5), lit::<T>(2.0));
    let p = fc.p();
    let sp = p.sqrt();
    let om = c.lapse;
    let grad_om = vscale(om, &c.dlog_lapse());
    let lapse = om / sp;
    let tr_chib = (fc.lg / fc.lbf).sqrt() * c.tr_chib();
    // ∇̸(2Ω/√P)
    let grad_w = vadd(&vscale(two / sp, &grad_om), &vscale(-om / (p * sp), &fc.grad_p));
    let tr_chi = fc.lf / sp * c.tr_chib() + (fc.lbf / fc.lg).sqrt() * c.tr_chi()
        - vdot(&grad_w, &fc.grad_f)
        - two * om / sp * fc.lap_f;
    let lb_hat_lbf = fc.lb_lbf / om;
    let l_hat_p = fc.l_p / om;
    let omega_hat = fc.lf / sp * c.omegab_hat + (fc.lbf / fc.lg).sqrt() * c.omega_hat
        - two / sp * vdot(&fc.grad_f, &grad_om)
        - h * fc.lf / (fc.lbf * sp) * lb_hat_lbf
        - h / (sp * fc.lg) * l_hat_p
        + om / (p * sp) * vdot(&fc.grad_f, &fc.grad_p);
    let omegab_hat = (fc.lg / fc.lbf).sqrt() * c.omegab_hat - h * fc.lg.sqrt() / (fc.lbf * fc.lbf.sqrt()) * lb_hat_lbf;
    Ok(FoliationCoefficients {
        lapse,
        tr_chi,
        tr_chib,
        omega_hat,
        omegab_hat,
        omega: omega_hat * lapse,
        omegab: omegab_hat * lapse,
    })
}

/// Both sides of the propagated acceleration bounds: the outgoing bound
/// `|2ω̂̃ − tr̃χ| ≤ …` and the incoming one, given `|2ω̂ − trχ| ≤ ε trχ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationBound<T> {
    pub lhs: T,
    pub rhs: T,
    /// The correction terms added to `ε tr̃χ`, in the order of the bound.
    pub terms: [T; 6],
    pub lhs_bar: T,
    pub rhs_bar: T,
}

pub fn propagation_bound<T: Real>(fc: &FoliationChange<T>, c: &StructureCoefficients<T>, eps: T) -> Result<PropagationBound<T>> {
    let t = transform_foliation(fc, c)?;
    let two = lit::<T>(2.0);
    let p = fc.p();
    let sp = p.sqrt();
    let p32 = p * sp;
    let om = c.lapse;
    let grad_om = vscale(om, &c.dlog_lapse());
    let terms = [
        (fc.lf / (fc.lbf * sp) * fc.lb_lbf / om).abs(),
        (T::one() / (sp * fc.lg)) * (fc.l_p / om).abs(),
        two * om / p32 * vdot(&fc.grad_f, &fc.grad_p).abs(),
        two * (T::one() + eps) / sp * vdot(&grad_om, &fc.grad_f).abs(),
        (T::one() + eps) * om / p32 * vdot(&fc.grad_p, &fc.grad_f).abs(),
        two * (T::one() + eps) * om / sp * fc.lap_f.abs(),
    ];
    let rhs = eps * t.tr_chi + terms.iter().fold(T::zero(), |a, b| a + *b);
    let lhs = (two * t.omega_hat - t.tr_chi).abs();
    let lhs_bar = (two * t.omegab_hat - t.tr_chib).abs();
    let rhs_bar = eps * t.tr_chib + fc.lg.sqrt() / (fc.lbf * fc.lbf.sqrt()) * (fc.lb_lbf / om).abs();
    Ok(PropagationBound { lhs, rhs, terms, lhs_bar, rhs_bar })
}

/// Lorentz boost `e3 ↦ a e3`, `e4 ↦ a⁻¹ e4`. Derivatives are taken along
/// the frame the boost is applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostLaw<T> {
    pub a: T,
    /// `e3(a) = L̄̂ a`
    pub e3_a: T,
    /// `e4(a⁻¹) = L̂ a⁻¹`
    pub e4_ainv: T,
    /// `d̸ log a`
    pub dlog_a: Vec2<T>,
}

impl<T: Real> BoostLaw<T> {
    pub fn constant(a: T) -> Self {
        Self { a, e3_a: T::zero(), e4_ainv: T::zero(), dlog_a: [T::zero(); 2] }
    }

    /// The boost undoing `self`, expressed in the boosted frame.
    pub fn inverse(&self) -> Self {
        let a = self.a;
        Self { a: T::one() / a, e3_a: -self.e3_a / a, e4_ainv: -a * self.e4_ainv, dlog_a: vscale(-T::one(), &self.dlog_a) }
    }
}

pub fn boost_coefficients<T: Real>(b: &BoostLaw<T>, c: &StructureCoefficients<T>) -> Result<StructureCoefficients<T>> {
    if b.a <= T::zero() {
        return Err(Error::Positivity("boost parameter must be positive".into()));
    }
    let a = b.a;
    let mut out = *c;
    out.chib = mscale(a, &c.chib);
    out.chi = mscale(T::one() / a, &c.chi);
    out.zeta = vadd(&c.zeta, &b.dlog_a);
    out.omegab_hat = a * c.omegab_hat + b.e3_a;
    out.omega_hat = c.omega_hat / a + b.e4_ainv;
    out.omegab = out.omegab_hat * c.lapse;
    out.omega = out.omega_hat * c.lapse;
    Ok(out)
}

/// Boost data of a scalar field `a` at `x`, derivatives by central
/// differences along the unboosted frame of `metric`.
pub fn boost_law_fd<T: Real>(
    metric: &dyn Fn(&[T; 4]) -> Result<Mat4<T>>,
    a: &dyn Fn(&[T; 4]) -> Result<T>,
    x: &[T; 4],
    rel: T,
) -> Result<BoostLaw<T>> {
    let frame = NullFrame::from_metric(&metric(x)?)?;
    let a0 = a(x)?;
    if a0 <= T::zero() {
        return Err(Error::Positivity("boost parameter must be positive".into()));
    }
    let da = fd::gradient(a, x, rel)?;
    let e = frame.e;
    let along = |v: &[T; 4]| vdot4(v, &da);
    Ok(BoostLaw {
        a: a0,
        e3_a: along(&e[2]),
        e4_ainv: -along(&e[3]) / (a0 * a0),
        dlog_a: [along(&e[0]) / a0, along(&e[1]) / a0],
    })
}

/// The frame `(e1, e2, a e3, a⁻¹ e4)`.
pub fn boosted_frame<T: Real>(e: &[[T; 4]; 4], a: T) -> [[T; 4]; 4] {
    let mut out = *e;
    for m in 0..4 {
        out[2][m] = a * e[2][m];
        out[3][m] = e[3][m] / a;
    }
    out
}

/// `K + ¼trχ trχ̄ − ½(χ̂, χ̄̂) + ρ − Λ/3`.
pub fn gauss_residual<T: Real>(c: &StructureCoefficients<T>, rho: T, lambda: T) -> T {
    c.gauss_k + lit::<T>(0.25) * c.tr_chi() * c.tr_chib() - lit::<T>(0.5) * tensor::dot2(&c.chi_hat(), &c.chib_hat()) + rho
        - lambda / lit(3.0)
}

/// `ρ` from the Gauss equation.
pub fn rho_from_gauss<T: Real>(c: &StructureCoefficients<T>, lambda: T) -> T {
    -gauss_residual(c, T::zero(), lambda)
}
