//! Quadrature on spheres and cylinders, sphere averages, the areal time
//! function, inequality checks (isoperimetric, Sobolev trace, null Sobolev)
//! and residuals of the electromagnetic Hodge system on level sets of `r`.

use crate::charts::{SdsGauge, SdsGeometry};
use crate::error::{Error, Result};
use crate::fd;
use crate::nullframe::{boost_coefficients, BoostLaw, StructureCoefficients};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::tensor::{self, Mat2};
use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;
use std::num::NonZeroUsize;

pub type Mat3<T> = [[T; 3]; 3];
type R3<T> = [[[T; 3]; 3]; 3];

/// Sphere metric in coordinates `(θ¹, θ²)`.
pub type SphereMetric<'a, T> = &'a dyn Fn(T, T) -> Result<Mat2<T>>;
/// Scalar on a sphere.
pub type SphereScalar<'a, T> = &'a dyn Fn(T, T) -> Result<T>;

pub const DEFAULT_N_THETA: usize = 64;
pub const DEFAULT_N_PHI: usize = 128;
pub const DEFAULT_N_U: usize = 256;

// ------------------------------------------------------------ quadrature

/// Gauss–Legendre nodes in `cos θ¹` times a uniform azimuthal grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid<T> {
    pub n_theta: usize,
    pub n_phi: usize,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
    /// Round-sphere weights per polar node, azimuthal spacing included.
    pub weight: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereNode<T> {
    pub theta: T,
    pub phi: T,
    /// Weight of the unit round measure `sin θ dθ dφ`.
    pub weight: T,
}

impl<T: Real> SphereGrid<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        let nt = NonZeroUsize::new(n_theta).ok_or_else(|| Error::Config("n_theta must be positive".into()))?;
        if n_phi == 0 {
            return Err(Error::Config("n_phi must be positive".into()));
        }
        let gl = GaussLegendre::new(nt);
        let dphi = lit::<T>(2.0) * T::PI() / from_usize(n_phi);
        let mut theta = Vec::with_capacity(n_theta);
        let mut weight = Vec::with_capacity(n_theta);
        for &(x, w) in gl.as_node_weight_pairs() {
            theta.push(lit::<T>(x).acos());
            weight.push(lit::<T>(w) * dphi);
        }
        let phi = (0..n_phi).map(|j| (from_usize::<T>(j) + lit(0.5)) * dphi).collect();
        Ok(Self { n_theta, n_phi, theta, phi, weight })
    }

    /// Polynomial degree in the spherical harmonics integrated exactly.
    pub fn degree(&self) -> usize {
        (2 * self.n_theta - 1).min(self.n_phi - 1)
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(2 * self.n_theta, 2 * self.n_phi)
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes in fixed order (polar outer, azimuth inner).
    pub fn nodes(&self) -> impl Iterator<Item = SphereNode<T>> + '_ {
        self.theta.iter().zip(self.weight.iter()).flat_map(move |(&theta, &weight)| {
            self.phi.iter().map(move |&phi| SphereNode { theta, phi, weight })
        })
    }

    pub fn total_weight(&self) -> T {
        self.nodes().fold(T::zero(), |s, n| s + n.weight)
    }

    pub fn describe(&self) -> String {
        format!("gauss-legendre {}x{}", self.n_theta, self.n_phi)
    }
}

impl Default for SphereGrid<f64> {
    fn default() -> Self {
        Self::new(DEFAULT_N_THETA, DEFAULT_N_PHI).expect("default grid")
    }
}

/// Round metric of radius `r`.
pub fn round_metric<T: Real>(r: T) -> impl Fn(T, T) -> Result<Mat2<T>> {
    move |theta: T, _| {
        let s = theta.sin();
        Ok([[r * r, T::zero()], [T::zero(), r * r * s * s]])
    }
}

/// Ratio of the metric area element to the unit round one at a node.
fn density<T: Real>(gs: SphereMetric<T>, theta: T, phi: T) -> Result<T> {
    let g = gs(theta, phi)?;
    let d = tensor::det(&g);
    if !(d > T::zero()) || !g[0][0].is_finite() {
        return Err(Error::DegenerateMetric(format!("sphere metric not positive at theta = {}", to_f64(theta))));
    }
    Ok(d.sqrt() / theta.sin())
}

/// `∫ f dμ_g̸`.
pub fn integrate<T: Real>(f: SphereScalar<T>, gs: SphereMetric<T>, grid: &SphereGrid<T>) -> Result<T> {
    let mut s = T::zero();
    for n in grid.nodes() {
        s = s + f(n.theta, n.phi)? * density(gs, n.theta, n.phi)? * n.weight;
    }
    Ok(s)
}

pub fn area<T: Real>(gs: SphereMetric<T>, grid: &SphereGrid<T>) -> Result<T> {
    integrate(&|_, _| Ok(T::one()), gs, grid)
}

/// `r = √(Area / 4π)`.
pub fn area_radius<T: Real>(gs: SphereMetric<T>, grid: &SphereGrid<T>) -> Result<T> {
    Ok((area(gs, grid)? / (lit::<T>(4.0) * T::PI())).sqrt())
}

pub fn sphere_average<T: Real>(f: SphereScalar<T>, gs: SphereMetric<T>, grid: &SphereGrid<T>) -> Result<T> {
    Ok(integrate(f, gs, grid)? / area(gs, grid)?)
}

/// `|∇̸f|²` at a point, derivatives by central differences.
pub fn sphere_grad_sq<T: Real>(f: SphereScalar<T>, gs: SphereMetric<T>, theta: T, phi: T, rel: T) -> Result<T> {
    let ff = |x: &[T; 2]| f(x[0], x[1]);
    let d = fd::gradient(&ff, &[theta, phi], rel)?;
    let gi = tensor::inverse(&gs(theta, phi)?).ok_or_else(|| Error::DegenerateMetric("sphere metric singular".into()))?;
    Ok(tensor::bilinear(&gi, &d, &d))
}

// ------------------------------------------------------- areal foliation

/// Lapse and normal of the foliation by level sets of the area radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArealData<T> {
    pub r: T,
    pub avg_omega_trchi: T,
    pub avg_omega_trchib: T,
    pub q: T,
    /// `n = n3 L̄̂ + n4 L̂`.
    pub n: [T; 2],
}

impl<T: Real> ArealData<T> {
    /// `φ = (2/r) Ω / √(avg(Ωtrχ) avg(Ωtrχ̄))` at a point with null lapse `Ω`.
    pub fn lapse_phi(&self, omega: T) -> T {
        lit::<T>(2.0) / self.r * omega / (self.avg_omega_trchi * self.avg_omega_trchib).sqrt()
    }

    /// `g(n, n)`, which is −1 by construction.
    pub fn normal_norm(&self) -> T {
        lit::<T>(-4.0) * self.n[0] * self.n[1]
    }

    /// `∂_v r = (r/2) avg(Ωtrχ)`.
    pub fn dr_dv(&self) -> T {
        self.r * lit(0.5) * self.avg_omega_trchi
    }

    pub fn dr_du(&self) -> T {
        self.r * lit(0.5) * self.avg_omega_trchib
    }
}

pub fn areal_data<T: Real>(
    coeffs: &dyn Fn(T, T) -> Result<StructureCoefficients<T>>,
    gs: SphereMetric<T>,
    grid: &SphereGrid<T>,
) -> Result<ArealData<T>> {
    for n in grid.nodes() {
        let c = coeffs(n.theta, n.phi)?;
        if !(c.tr_chi() > T::zero() && c.tr_chib() > T::zero()) {
            return Err(Error::ExpansionSign(format!(
                "trchi = {}, trchib = {} at theta = {}",
                to_f64(c.tr_chi()),
                to_f64(c.tr_chib()),
                to_f64(n.theta)
            )));
        }
    }
    let ochi = |t: T, p: T| -> Result<T> {
        let c = coeffs(t, p)?;
        Ok(c.lapse * c.tr_chi())
    };
    let ochib = |t: T, p: T| -> Result<T> {
        let c = coeffs(t, p)?;
        Ok(c.lapse * c.tr_chib())
    };
    let r = area_radius(gs, grid)?;
    let a = sphere_average(&ochi, gs, grid)?;
    let ab = sphere_average(&ochib, gs, grid)?;
    let q = (a / ab).sqrt();
    Ok(ArealData { r, avg_omega_trchi: a, avg_omega_trchib: ab, q, n: [q * lit(0.5), lit::<T>(0.5) / q] })
}

// ------------------------------------------------- gauge asymptotics

/// One measured entry of the table of SdS asymptotics towards null
/// infinity, with its leading-order value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeTableEntry<T> {
    pub quantity: &'static str,
    pub gauge: SdsGauge,
    pub measured: T,
    pub expected: T,
    /// Relative error, or absolute when the expected value is zero.
    pub error: T,
}

impl<T: Real> GaugeTableEntry<T> {
    fn new(quantity: &'static str, gauge: SdsGauge, measured: T, expected: T) -> Self {
        let d = (measured - expected).abs();
        let error = if expected == T::zero() { d } else { d / expected.abs() };
        Self { quantity, gauge, measured, expected, error }
    }
}

pub const GAUGE_TABLE_QUANTITIES: [&str; 6] = ["Omega2", "trchi", "trchib", "omegahat", "omegabhat", "q"];

/// Coefficients of SdS in the EF, Kruskal and initial-data gauges on the
/// sphere `{u* = ustar, r}`, against their leading asymptotics. Two
/// gauge-invariant rows per gauge follow the six table rows:
/// `¼trχ trχ̄ → Λ/3` and `|2ω̂ − trχ| → 0`.
pub fn gauge_table<T: Real>(geo: &SdsGeometry<T>, r: T, ustar: T, grid: &SphereGrid<T>) -> Result<Vec<GaugeTableEntry<T>>> {
    let vstar = geo.rstar(r)? - ustar;
    if ustar <= T::zero() {
        return Err(Error::Domain("initial-data column needs u* > 0".into()));
    }
    let l = (geo.params.lambda / lit(3.0)).sqrt();
    let k = geo.kappa;
    let two = lit::<T>(2.0);
    let e = |x: T| x.exp();
    let mut out = Vec::new();
    for gauge in [SdsGauge::EF, SdsGauge::Kruskal, SdsGauge::InitialData] {
        let (u, v) = geo.from_ef(gauge, ustar, vstar);
        let c = StructureCoefficients::spherical(&geo.spherical(gauge, u, v)?);
        let rc = c.gauss_k.sqrt().recip();
        let ad = areal_data(&|_, _| Ok(c), &round_metric(rc), grid)?;
        let base = l * l * r * r;
        let expected: [T; 6] = match gauge {
            SdsGauge::EF => [base, two * l, two * l, l, l, T::one()],
            SdsGauge::Kruskal => [
                base / (lit::<T>(4.0) * k * k),
                two * l * e(two * k * ustar),
                two * l * e(two * k * vstar),
                l * e(-two * k * vstar),
                l * e(-two * k * ustar),
                e(two * k * ustar),
            ],
            SdsGauge::InitialData => [
                base / (lit::<T>(4.0) * k * k) * e(two * k * ustar),
                two * l * e(k * ustar),
                two * l * e(-k * ustar),
                l * e(k * ustar),
                l * e(-k * ustar),
                e(k * ustar),
            ],
        };
        let measured = [c.lapse * c.lapse, c.tr_chi(), c.tr_chib(), c.omega_hat, c.omegab_hat, ad.q];
        for i in 0..6 {
            out.push(GaugeTableEntry::new(GAUGE_TABLE_QUANTITIES[i], gauge, measured[i], expected[i]));
        }
        out.push(GaugeTableEntry::new("quarter_trchi_trchib", gauge, lit::<T>(0.25) * c.tr_chi() * c.tr_chib(), l * l));
        out.push(GaugeTableEntry::new("abs_2omegahat_minus_trchi", gauge, (two * c.omega_hat - c.tr_chi()).abs(), T::zero()));
    }
    Ok(out)
}

// ------------------------------------------------------------- reports

/// Machine-readable outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_estimate: f64,
    pub grid: String,
    pub converged: bool,
}

/// Relative tolerance for calling a constant estimate refinement-stable.
pub const REFINEMENT_TOL: f64 = 0.02;

impl InequalityReport {
    /// Builds a report from a coarse and a refined evaluation `(lhs, rhs)`.
    pub fn from_refinement<T: Real>(name: &str, grid: String, coarse: (T, T), fine: (T, T)) -> Self {
        let c0 = ratio(coarse.0, coarse.1);
        let c1 = ratio(fine.0, fine.1);
        let converged = (c0 == c1) || ((c1 - c0).abs() <= REFINEMENT_TOL * c1.abs().max(c0.abs()));
        Self {
            inequality: name.to_string(),
            lhs: to_f64(fine.0),
            rhs: to_f64(fine.1),
            constant_estimate: c1,
            grid,
            converged,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

fn ratio<T: Real>(a: T, b: T) -> f64 {
    let (a, b) = (to_f64(a), to_f64(b));
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

// -------------------------------------------------------- isoperimetric

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isoperimetric<T> {
    /// `∫ (Φ − Φ̄)²`
    pub lhs: T,
    /// `(∫ |∇̸Φ|)²`
    pub rhs: T,
    pub i_est: T,
}

pub fn isoperimetric_check<T: Real>(
    phi: SphereScalar<T>,
    gs: SphereMetric<T>,
    grid: &SphereGrid<T>,
    rel: T,
) -> Result<Isoperimetric<T>> {
    let mean = sphere_average(phi, gs, grid)?;
    let dev = |t: T, p: T| -> Result<T> {
        let d = phi(t, p)? - mean;
        Ok(d * d)
    };
    let grad = |t: T, p: T| -> Result<T> { Ok(sphere_grad_sq(phi, gs, t, p, rel)?.sqrt()) };
    let lhs = integrate(&dev, gs, grid)?;
    let g = integrate(&grad, gs, grid)?;
    let rhs = g * g;
    let i_est = if rhs > T::zero() { lhs / rhs } else { T::zero() };
    Ok(Isoperimetric { lhs, rhs, i_est })
}

// ------------------------------------------------------------- cylinders

/// A slab `u ∈ [u0, u1]` of a level set of `r`, with metric
/// `a² du² + g̸(u)`.
pub struct Cylinder<'a, T> {
    pub u0: T,
    pub u1: T,
    pub n_u: usize,
    /// `g̸_AB(u, θ¹, θ²)`
    pub sphere: &'a dyn Fn(T, T, T) -> Result<Mat2<T>>,
    /// Lapse `a(u, θ¹, θ²)` of the foliation by `S_u`.
    pub lapse: &'a dyn Fn(T, T, T) -> Result<T>,
    pub grid: SphereGrid<T>,
}

/// Scalar field on a cylinder.
pub struct CylinderField<'a, T> {
    pub cylinder: Cylinder<'a, T>,
    pub value: &'a dyn Fn(T, T, T) -> Result<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevTrace<T> {
    /// `(∫ r⁶|θ|⁶)^{1/6}`
    pub l6_lhs: T,
    /// `sup_u (∫_{S_u} r⁴|θ|⁴)^{1/4}`
    pub l4_sup_lhs: T,
    /// `(∫ |θ|² + r²|∇̄θ|²)^{1/2}`
    pub rhs: T,
    pub ratio_l6: T,
    pub ratio_l4: T,
    /// `sup |r trθ|`
    pub h: T,
    pub a_min: T,
    pub a_max: T,
}

fn trapezoid_weights<T: Real>(a: T, b: T, n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n < 2 {
        return Err(Error::Config("trapezoid rule needs at least two nodes".into()));
    }
    let h = (b - a) / from_usize(n - 1);
    let xs = (0..n).map(|i| a + h * from_usize(i)).collect();
    let ws = (0..n).map(|i| if i == 0 || i == n - 1 { h * lit(0.5) } else { h }).collect();
    Ok((xs, ws))
}

pub fn sobolev_trace_check<T: Real>(f: &CylinderField<T>, rel: T) -> Result<SobolevTrace<T>> {
    let cyl = &f.cylinder;
    let (us, wu) = trapezoid_weights(cyl.u0, cyl.u1, cyl.n_u)?;
    let (mut i6, mut rhs2, mut sup4) = (T::zero(), T::zero(), T::zero());
    let (mut h, mut a_min, mut a_max) = (T::zero(), T::infinity(), T::zero());
    for (&u, &w) in us.iter().zip(wu.iter()) {
        let gs = |t: T, p: T| (cyl.sphere)(u, t, p);
        let r = area_radius(&gs, &cyl.grid)?;
        let (mut s4, mut s6, mut s2) = (T::zero(), T::zero(), T::zero());
        for n in cyl.grid.nodes() {
            let (t, p) = (n.theta, n.phi);
            let dmu = density(&gs, t, p)? * n.weight;
            let a = (cyl.lapse)(u, t, p)?;
            if !(a > T::zero()) {
                return Err(Error::Positivity("cylinder lapse must be positive".into()));
            }
            a_min = a_min.min(a);
            a_max = a_max.max(a);
            let logdet = |uu: T| -> Result<T> { Ok(tensor::det(&(cyl.sphere)(uu, t, p)?).ln()) };
            let tr_theta = fd::derivative(logdet, u, rel)? / (lit::<T>(2.0) * a);
            h = h.max((r * tr_theta).abs());
            let v = (f.value)(u, t, p)?;
            let du = fd::derivative(|uu| (f.value)(uu, t, p), u, rel)?;
            let ang = |tt: T, pp: T| (f.value)(u, tt, pp);
            let grad2 = du * du / (a * a) + sphere_grad_sq(&ang, &gs, t, p, rel)?;
            let v2 = v * v;
            s4 = s4 + v2 * v2 * dmu;
            s6 = s6 + v2 * v2 * v2 * a * dmu;
            s2 = s2 + (v2 + r * r * grad2) * a * dmu;
        }
        let r2 = r * r;
        i6 = i6 + r2 * r2 * r2 * s6 * w;
        rhs2 = rhs2 + s2 * w;
        sup4 = sup4.max(r2 * r2 * s4);
    }
    let l6 = i6.powf(lit(1.0 / 6.0));
    let l4 = sup4.sqrt().sqrt();
    let rhs = rhs2.sqrt();
    let div = |x: T| if rhs > T::zero() { x / rhs } else { T::zero() };
    Ok(SobolevTrace { l6_lhs: l6, l4_sup_lhs: l4, rhs, ratio_l6: div(l6), ratio_l4: div(l4), h, a_min, a_max })
}

// ------------------------------------------------------------ null cones

/// Outgoing cone with round spheres `g̸ = r(v)² γ` and lapse constant on
/// each sphere.
pub struct NullCone<'a, T> {
    pub v0: T,
    pub v1: T,
    pub n_v: usize,
    pub radius: &'a dyn Fn(T) -> Result<T>,
    pub lapse: &'a dyn Fn(T) -> Result<T>,
    pub tr_chi: &'a dyn Fn(T) -> Result<T>,
    pub grid: SphereGrid<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullSobolev<T> {
    pub f: T,
    pub d: T,
    pub c_chi: T,
    /// `(∫ ‖Ωθ‖₄² dv, F)`
    pub four: (T, T),
    /// `(sup r‖θ‖₄², D + F)`
    pub sup: (T, T),
    /// `(∫ Ω²r²‖θ‖₆⁶ dv, (D² + F²) F)`
    pub six: (T, T),
}

/// Normalised norms `‖·‖_p = (A⁻¹ ∫ |·|^p)^{1/p}` with `A = 4πr²`.
pub fn null_sobolev_check<T: Real>(cone: &NullCone<T>, theta: &dyn Fn(T, T, T) -> Result<T>, rel: T) -> Result<NullSobolev<T>> {
    let (vs, wv) = trapezoid_weights(cone.v0, cone.v1, cone.n_v)?;
    let (mut f, mut four, mut sup, mut six) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut c_chi = T::zero();
    let mut d = T::zero();
    for (i, (&v, &w)) in vs.iter().zip(wv.iter()).enumerate() {
        let r = (cone.radius)(v)?;
        let om = (cone.lapse)(v)?;
        let tc = (cone.tr_chi)(v)?;
        if !(tc > T::zero()) {
            return Err(Error::ExpansionSign(format!("trchi = {} on the cone", to_f64(tc))));
        }
        c_chi = c_chi.max(r * lit(0.5) * tc / om);
        let gs = round_metric(r);
        let (mut m2, mut m4, mut m6, mut g2, mut d2) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        let mut a = T::zero();
        for n in cone.grid.nodes() {
            let (t, p) = (n.theta, n.phi);
            let dmu = density(&gs, t, p)? * n.weight;
            let x = theta(v, t, p)?;
            let x2 = x * x;
            m2 = m2 + x2 * dmu;
            m4 = m4 + x2 * x2 * dmu;
            m6 = m6 + x2 * x2 * x2 * dmu;
            let ang = |tt: T, pp: T| theta(v, tt, pp);
            g2 = g2 + sphere_grad_sq(&ang, &gs, t, p, rel)? * dmu;
            let dv = fd::derivative(|vv| theta(vv, t, p), v, rel)?;
            d2 = d2 + dv * dv * dmu;
            a = a + dmu;
        }
        let om2 = om * om;
        let n2 = m2 / a;
        let n4_sq = (m4 / a).sqrt();
        let n6_6 = m6 / a;
        f = f + (om2 * n2 + r * r * om2 * g2 / a + r * r * d2 / (a * om2)) * w;
        four = four + om2 * n4_sq * w;
        sup = sup.max(r * n4_sq);
        six = six + om2 * r * r * n6_6 * w;
        if i == 0 {
            d = r * n4_sq;
        }
    }
    Ok(NullSobolev { f, d, c_chi, four: (four, f), sup: (sup, d + f), six: (six, (d * d + f * f) * f) })
}

// ----------------------------------------------- second fundamental form

/// Second fundamental form of the level sets of `r` in the frame
/// `(X, e1, e2)` from the structure coefficients and the boost `q`:
/// `k(X,X) = ½(qω̄̂ + q⁻¹ω̂ + L̄̂q + L̂q⁻¹)`, `k(X,A) = ζ_A + d̸_A log q`,
/// `k(A,B) = ½(qχ̄ + q⁻¹χ)_AB`.
pub fn second_fundamental_form<T: Real>(c: &StructureCoefficients<T>, q: &BoostLaw<T>) -> Result<Mat3<T>> {
    let b = boost_coefficients(q, c)?;
    let h = lit::<T>(0.5);
    let mut k = [[T::zero(); 3]; 3];
    k[0][0] = h * (b.omegab_hat + b.omega_hat);
    for a in 0..2 {
        k[0][a + 1] = b.zeta[a];
        k[a + 1][0] = b.zeta[a];
        for bb in 0..2 {
            k[a + 1][bb + 1] = h * (b.chib[a][bb] + b.chi[a][bb]);
        }
    }
    Ok(k)
}

// ---------------------------------------------------------- Hodge system

/// Foliation by level sets of `r` in coordinates `(r, y¹, y², y³)` with
/// zero shift, so that `∂_r = φ n`.
pub struct Slicing<'a, T> {
    /// Induced metric `ḡ_ij(r, y)`.
    pub metric: &'a dyn Fn(&[T; 4]) -> Result<Mat3<T>>,
    /// Lapse `φ(r, y)`.
    pub lapse: &'a dyn Fn(&[T; 4]) -> Result<T>,
}

/// `E`, `H` as covariant coordinate components on the slices.
pub struct EmField<'a, T> {
    pub e: &'a dyn Fn(&[T; 4]) -> Result<Mat3<T>>,
    pub h: &'a dyn Fn(&[T; 4]) -> Result<Mat3<T>>,
}

/// `ḡ`-norms of the residuals of the Hodge system. The first four are the
/// divergence and curl equations with the modified Lie derivative; the
/// last two the same evolution equations written with the projected
/// covariant time derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HodgeResidual<T> {
    pub div_e: T,
    pub curl_e: T,
    pub div_h: T,
    pub curl_h: T,
    pub evolution_e: T,
    pub evolution_h: T,
}

impl<T: Real> HodgeResidual<T> {
    pub fn as_array(&self) -> [T; 6] {
        [self.div_e, self.curl_e, self.div_h, self.curl_h, self.evolution_e, self.evolution_h]
    }

    pub fn max(&self) -> T {
        self.as_array().iter().fold(T::zero(), |m, &x| m.max(x))
    }
}

pub const HODGE_NAMES: [&str; 6] = ["div_E", "curl_E", "div_H", "curl_H", "evolution_E", "evolution_H"];

struct Geom3<T> {
    g: Mat3<T>,
    gi: Mat3<T>,
    /// `ε_i^{jk}`
    eps: R3<T>,
}

impl<T: Real> Geom3<T> {
    fn new(g: Mat3<T>) -> Result<Self> {
        let d = tensor::det(&g);
        if !(d > T::zero()) {
            return Err(Error::DegenerateMetric("slice metric not positive".into()));
        }
        let gi = tensor::inverse(&g).ok_or_else(|| Error::DegenerateMetric("slice metric singular".into()))?;
        let vol = d.sqrt();
        let mut low = [[[T::zero(); 3]; 3]; 3];
        for (i, j, k, s) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)] {
            low[i][j][k] = vol * lit(s);
        }
        let mut eps = [[[T::zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut s = T::zero();
                    for m in 0..3 {
                        for n in 0..3 {
                            s = s + low[i][m][n] * gi[m][j] * gi[n][k];
                        }
                    }
                    eps[i][j][k] = s;
                }
            }
        }
        Ok(Self { g, gi, eps })
    }

    /// `A_i^j`
    fn mixed(&self, a: &Mat3<T>) -> Mat3<T> {
        tensor::matmul(a, &self.gi)
    }

    fn dot(&self, a: &Mat3<T>, b: &Mat3<T>) -> T {
        let am = self.mixed(a);
        let bm = self.mixed(b);
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + am[i][j] * bm[j][i];
            }
        }
        s
    }

    fn trace(&self, a: &Mat3<T>) -> T {
        let m = self.mixed(a);
        m[0][0] + m[1][1] + m[2][2]
    }

    fn norm_t(&self, a: &Mat3<T>) -> T {
        self.dot(a, &tensor::transpose(a)).abs().sqrt()
    }

    fn norm_v(&self, v: &[T; 3]) -> T {
        tensor::bilinear(&self.gi, v, v).abs().sqrt()
    }

    /// `div A_j = ∇^i A_ij`
    fn div(&self, da: &R3<T>) -> [T; 3] {
        core::array::from_fn(|j| {
            let mut s = T::zero();
            for i in 0..3 {
                for k in 0..3 {
                    s = s + self.gi[i][k] * da[k][i][j];
                }
            }
            s
        })
    }

    /// `curl A_ij = ½(ε_i^{kl} ∇_k A_lj + ε_j^{kl} ∇_k A_li)`
    fn curl(&self, da: &R3<T>) -> Mat3<T> {
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        s = s + self.eps[i][k][l] * da[k][l][j] + self.eps[j][k][l] * da[k][l][i];
                    }
                }
                out[i][j] = s * lit(0.5);
            }
        }
        out
    }

    /// `(A ∧ B)_i = ε_i^{jk} A_j^l B_lk`
    fn wedge(&self, a: &Mat3<T>, b: &Mat3<T>) -> [T; 3] {
        let am = self.mixed(a);
        core::array::from_fn(|i| {
            let mut s = T::zero();
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        s = s + self.eps[i][j][k] * am[j][l] * b[l][k];
                    }
                }
            }
            s
        })
    }

    /// `(v ∧ A)_ij = ε_i^{mn} v_m A_nj + ε_j^{mn} v_m A_ni`
    fn vwedge(&self, v: &[T; 3], a: &Mat3<T>) -> Mat3<T> {
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for m in 0..3 {
                    for n in 0..3 {
                        s = s + self.eps[i][m][n] * v[m] * a[n][j] + self.eps[j][m][n] * v[m] * a[n][i];
                    }
                }
                out[i][j] = s;
            }
        }
        out
    }

    /// `(A × B)_ij = ε_i^{ab} ε_j^{cd} A_ac B_bd + ⅓(A·B) g_ij − ⅓ trA trB g_ij`
    fn cross(&self, a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
        let third = lit::<T>(1.0 / 3.0);
        let c = third * (self.dot(a, b) - self.trace(a) * self.trace(b));
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for x in 0..3 {
                    for y in 0..3 {
                        for z in 0..3 {
                            for w in 0..3 {
                                s = s + self.eps[i][x][y] * self.eps[j][z][w] * a[x][z] * b[y][w];
                            }
                        }
                    }
                }
                out[i][j] = s + c * self.g[i][j];
            }
        }
        out
    }

    /// Symmetric trace-free part.
    fn stf(&self, a: &Mat3<T>) -> Mat3<T> {
        let tr = self.trace(a) / lit(3.0);
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (a[i][j] + a[j][i]) * lit(0.5) - tr * self.g[i][j];
            }
        }
        out
    }

    /// `A_i^c B_cj`
    fn product(&self, a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
        tensor::matmul(&self.mixed(a), b)
    }
}

fn lincomb<T: Real>(terms: &[(T, &Mat3<T>)]) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for (c, m) in terms {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = out[i][j] + *c * m[i][j];
            }
        }
    }
    out
}

fn at_r<'a, T: Real>(f: &'a dyn Fn(&[T; 4]) -> Result<Mat3<T>>, x: &[T; 4]) -> impl Fn(&[T; 3]) -> Result<Mat3<T>> + 'a {
    let r = x[0];
    move |y: &[T; 3]| f(&[r, y[0], y[1], y[2]])
}

fn r_derivative<T: Real>(f: &dyn Fn(&[T; 4]) -> Result<Mat3<T>>, x: &[T; 4], rel: T) -> Result<Mat3<T>> {
    let h = fd::step(x[0], rel);
    let p = f(&[x[0] + h, x[1], x[2], x[3]])?;
    let m = f(&[x[0] - h, x[1], x[2], x[3]])?;
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (p[i][j] - m[i][j]) / (h + h);
        }
    }
    Ok(out)
}

/// `k_ij = ∂_r ḡ_ij / (2φ)`.
pub fn slice_second_form<T: Real>(sl: &Slicing<T>, x: &[T; 4], rel: T) -> Result<Mat3<T>> {
    let dg = r_derivative(sl.metric, x, rel)?;
    let phi = (sl.lapse)(x)?;
    Ok(lincomb(&[(T::one() / (phi + phi), &dg)]))
}

/// Residuals of the Hodge system at `x`, all derivatives by central
/// differences with relative step `rel`.
pub fn hodge_residual<T: Real>(sl: &Slicing<T>, em: &EmField<T>, x: &[T; 4], rel: T) -> Result<HodgeResidual<T>> {
    let gy = at_r(sl.metric, x);
    let y = [x[1], x[2], x[3]];
    let (g, _, gam) = fd::christoffel_fd(&gy, &y, rel)?;
    let geo = Geom3::new(g)?;
    let phi = (sl.lapse)(x)?;
    let logphi = |yy: &[T; 3]| -> Result<T> { Ok((sl.lapse)(&[x[0], yy[0], yy[1], yy[2]])?.ln()) };
    let acc = fd::gradient(&logphi, &y, rel)?;
    let k = slice_second_form(sl, x, rel)?;
    let e = (em.e)(x)?;
    let h = (em.h)(x)?;
    let ey = at_r(em.e, x);
    let hy = at_r(em.h, x);
    let de = fd::covariant_tensor2(&ey, &gam, &y, rel)?;
    let dh = fd::covariant_tensor2(&hy, &gam, &y, rel)?;
    let inv_phi = T::one() / phi;
    let lie_e = lincomb(&[(inv_phi, &r_derivative(em.e, x, rel)?)]);
    let lie_h = lincomb(&[(inv_phi, &r_derivative(em.h, x, rel)?)]);
    let two3 = lit::<T>(2.0 / 3.0);
    let hat_e = lincomb(&[(T::one(), &lie_e), (two3 * geo.dot(&k, &e), &geo.g)]);
    let hat_h = lincomb(&[(T::one(), &lie_h), (two3 * geo.dot(&k, &h), &geo.g)]);
    let half = lit::<T>(0.5);
    let one = T::one();

    let vsub = |a: [T; 3], b: [T; 3], s: T| -> [T; 3] { core::array::from_fn(|i| a[i] + s * b[i]) };
    let div_e = vsub(geo.div(&de), geo.wedge(&h, &k), -one);
    let div_h = vsub(geo.div(&dh), geo.wedge(&e, &k), one);
    let curl_e = lincomb(&[
        (one, &hat_h),
        (one, &geo.curl(&de)),
        (-one, &geo.vwedge(&acc, &e)),
        (half, &geo.cross(&k, &h)),
    ]);
    let curl_h = lincomb(&[
        (-one, &hat_e),
        (one, &geo.curl(&dh)),
        (-one, &geo.vwedge(&acc, &h)),
        (-half, &geo.cross(&k, &e)),
    ]);

    let theta = geo.trace(&k);
    let three = lit::<T>(3.0);
    let dot_e = lincomb(&[(one, &lie_e), (-one, &geo.product(&k, &e)), (-one, &tensor::transpose(&geo.product(&k, &e)))]);
    let dot_h = lincomb(&[(one, &lie_h), (-one, &geo.product(&k, &h)), (-one, &tensor::transpose(&geo.product(&k, &h)))]);
    let sigma = lincomb(&[(one, &k), (-theta / three, &geo.g)]);
    let evo_e = lincomb(&[
        (one, &geo.stf(&dot_e)),
        (theta, &e),
        (-three, &geo.stf(&geo.product(&sigma, &e))),
        (-one, &geo.curl(&dh)),
        (-one, &geo.vwedge(&acc, &h)),
    ]);
    let evo_h = lincomb(&[
        (one, &geo.stf(&dot_h)),
        (theta, &h),
        (-three, &geo.stf(&geo.product(&sigma, &h))),
        (one, &geo.curl(&de)),
        (one, &geo.vwedge(&acc, &e)),
    ]);
    let out = HodgeResidual {
        div_e: geo.norm_v(&div_e),
        curl_e: geo.norm_t(&curl_e),
        div_h: geo.norm_v(&div_h),
        curl_h: geo.norm_t(&curl_h),
        evolution_e: geo.norm_t(&evo_e),
        evolution_h: geo.norm_t(&evo_h),
    };
    if out.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("non-finite Hodge residual".into()));
    }
    Ok(out)
}

/// Residuals at steps `rel` and `rel/2` with the observed order of each
/// component (`log₂` of the ratio; `NaN` where both vanish).
pub fn hodge_convergence<T: Real>(
    sl: &Slicing<T>,
    em: &EmField<T>,
    x: &[T; 4],
    rel: T,
) -> Result<(HodgeResidual<T>, HodgeResidual<T>, [f64; 6])> {
    let a = hodge_residual(sl, em, x, rel)?;
    let b = hodge_residual(sl, em, x, rel * lit(0.5))?;
    let (aa, bb) = (a.as_array(), b.as_array());
    let order = core::array::from_fn(|i| {
        let (p, q) = (to_f64(aa[i]), to_f64(bb[i]));
        if q == 0.0 {
            f64::NAN
        } else {
            (p / q).log2()
        }
    });
    Ok((a, b, order))
}

/// Coordinate components `M_ij = Σ M_ab θ^a_i θ^b_j` of a frame tensor,
/// with `coframe[a]` the coordinate components of the dual covector `θ^a`.
pub fn frame_to_coords<T: Real>(m: &Mat3<T>, coframe: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = T::zero();
            for a in 0..3 {
                for b in 0..3 {
                    s = s + m[a][b] * coframe[a][i] * coframe[b][j];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Slices `r = const` of Schwarzschild–de Sitter beyond the cosmological
/// horizon in static coordinates `(r, t, θ¹, θ²)`:
/// `ḡ = F dt² + r² γ`, `φ = F^{-1/2}`.
pub fn sds_slice_metric<T: Real>(p: &crate::charts::SdSParams<T>, x: &[T; 4]) -> Result<Mat3<T>> {
    let f = p.f(x[0]);
    if !(f > T::zero()) {
        return Err(Error::HorizonProximity(to_f64(f)));
    }
    let r2 = x[0] * x[0];
    let s = x[2].sin();
    let z = T::zero();
    Ok([[f, z, z], [z, r2, z], [z, z, r2 * s * s]])
}

pub fn sds_slice_lapse<T: Real>(p: &crate::charts::SdSParams<T>, x: &[T; 4]) -> Result<T> {
    let f = p.f(x[0]);
    if !(f > T::zero()) {
        return Err(Error::HorizonProximity(to_f64(f)));
    }
    Ok(T::one() / f.sqrt())
}

/// Coframe of `(X, e1, e2)` on the static slices, `X = −F^{-1/2} ∂_t`.
pub fn sds_slice_coframe<T: Real>(p: &crate::charts::SdSParams<T>, x: &[T; 4]) -> Mat3<T> {
    let z = T::zero();
    let r = x[0];
    [[-p.f(r).sqrt(), z, z], [z, r, z], [z, z, r * x[2].sin()]]
}

/// Exact `(E, H)` of Schwarzschild–de Sitter on the static slices, from the
/// null decomposition with `ρ = −2m/r³` only.
pub fn sds_em_field<T: Real>(p: &crate::charts::SdSParams<T>, x: &[T; 4]) -> Result<(Mat3<T>, Mat3<T>)> {
    let w = crate::weyl::WeylNull::only_rho(p.rho(x[0]));
    let em = crate::weyl::em_decompose(&w, T::one());
    let cf = sds_slice_coframe(p, x);
    Ok((frame_to_coords(&em.e, &cf), frame_to_coords(&em.h, &cf)))
}
