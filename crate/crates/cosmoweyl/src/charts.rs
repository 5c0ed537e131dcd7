//! Coordinate charts of de Sitter (normalised to `Λ/3 = 1`) and of
//! Schwarzschild–de Sitter in three double-null gauges.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::tensor::{det, inverse, matmul, Mat4};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ChartTag {
    Stereographic,
    Static,
    DoubleNullDS,
    EF,
    Kruskal,
    InitialData,
}

impl ChartTag {
    pub fn coordinate_names(self) -> [&'static str; 4] {
        match self {
            ChartTag::Stereographic => ["u", "y1", "y2", "y3"],
            ChartTag::Static => ["t'", "r", "theta1", "theta2"],
            ChartTag::DoubleNullDS | ChartTag::EF => ["u*", "v*", "theta1", "theta2"],
            ChartTag::Kruskal => ["uK", "vK", "theta1", "theta2"],
            ChartTag::InitialData => ["u_", "v_", "theta1", "theta2"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T> {
    pub tag: ChartTag,
    pub coords: [T; 4],
}

/// Point of the unit hyperboloid `−t² + x² + |x′|² = 1` in ℝ^{1,4}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint5<T> {
    pub t: T,
    pub x: T,
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T: Real> AmbientPoint5<T> {
    pub fn new(t: T, x: T, x1: T, x2: T, x3: T) -> Self {
        Self { t, x, x1, x2, x3 }
    }

    pub fn as_array(&self) -> [T; 5] {
        [self.t, self.x, self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [T; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn hyperboloid_residual(&self) -> T {
        -self.t * self.t + self.x * self.x + self.radius_sq() - T::one()
    }

    pub fn on_hyperboloid(&self, tol: T) -> bool {
        self.hyperboloid_residual().abs() <= tol
    }

    fn radius_sq(&self) -> T {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    /// `|x′|`, the area radius of the round spheres.
    pub fn radius(&self) -> T {
        self.radius_sq().sqrt()
    }
}

/// Metric components at a point together with the inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAtPoint<T> {
    pub g: Mat4<T>,
    pub ginv: Mat4<T>,
    pub tag: ChartTag,
}

impl<T: Real> MetricAtPoint<T> {
    /// Inverts `g` and checks the Lorentzian signature through the sign of
    /// the determinant.
    pub fn new(g: Mat4<T>, tag: ChartTag) -> Result<Self> {
        let ginv = inverse(&g).ok_or_else(|| Error::DegenerateMetric(format!("{tag:?} metric is singular")))?;
        if det(&g) >= T::zero() {
            return Err(Error::DegenerateMetric(format!("{tag:?} metric is not Lorentzian")));
        }
        Ok(Self { g, ginv, tag })
    }

    /// `max |g·g⁻¹ − 1|`.
    pub fn inverse_residual(&self) -> T {
        let p = matmul(&self.g, &self.ginv);
        let mut m = T::zero();
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { T::one() } else { T::zero() };
                m = m.max((*v - e).abs());
            }
        }
        m
    }
}

/// Metric of a spherically symmetric double-null chart,
/// `−4Ω² du dv + r² γ̊`.
pub fn spherical_null_metric<T: Real>(omega2: T, r: T, theta1: T, tag: ChartTag) -> Result<MetricAtPoint<T>> {
    let mut g = [[T::zero(); 4]; 4];
    g[0][1] = lit::<T>(-2.0) * omega2;
    g[1][0] = g[0][1];
    g[2][2] = r * r;
    let s = theta1.sin();
    g[3][3] = r * r * s * s;
    MetricAtPoint::new(g, tag)
}

/// Minkowski metric of the ambient ℝ^{1,4}.
pub fn ambient_metric<T: Real>() -> [[T; 5]; 5] {
    let mut m = [[T::zero(); 5]; 5];
    m[0][0] = -T::one();
    for (i, row) in m.iter_mut().enumerate().skip(1) {
        row[i] = T::one();
    }
    m
}

// ------------------------------------------------------------------ de Sitter

pub fn embed_stereographic<T: Real>(u: T, y: [T; 3]) -> Result<AmbientPoint5<T>> {
    let four = lit::<T>(4.0);
    let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let d = four - u * u + y2;
    if d <= T::zero() {
        return Err(Error::Domain(format!("stereographic denominator {d:e} <= 0")));
    }
    Ok(AmbientPoint5::new(
        four * u / d,
        (four + u * u - y2) / d,
        four * y[0] / d,
        four * y[1] / d,
        four * y[2] / d,
    ))
}

/// `g = e^{−2Φ} η` with `e^Φ = 1 + ¼(−u² + |y|²)`.
pub fn stereographic_metric<T: Real>(u: T, y: [T; 3]) -> Result<MetricAtPoint<T>> {
    let ephi = T::one() + lit::<T>(0.25) * (-u * u + y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    if ephi <= T::zero() {
        return Err(Error::Domain(format!("conformal factor e^Phi = {ephi:e} <= 0")));
    }
    let c = T::one() / (ephi * ephi);
    let mut g = [[T::zero(); 4]; 4];
    g[0][0] = -c;
    g[1][1] = c;
    g[2][2] = c;
    g[3][3] = c;
    MetricAtPoint::new(g, ChartTag::Stereographic)
}

/// Static coordinates `(t′, r)` of a point in the static patch `x > |t|`.
pub fn static_coords<T: Real>(p: &AmbientPoint5<T>) -> Result<(T, T)> {
    if p.x <= p.t.abs() {
        return Err(Error::Domain("point outside the static patch x > |t|".into()));
    }
    let r = p.radius();
    if (r - T::one()).abs() <= T::epsilon() {
        return Err(Error::Domain("point on the horizon r = 1".into()));
    }
    let tp = lit::<T>(0.5) * ((p.x + p.t) / (p.x - p.t)).abs().ln();
    Ok((tp, r))
}

/// Inverse of [`static_coords`] with polar angles on the spheres.
pub fn static_embed<T: Real>(tp: T, r: T, theta1: T, theta2: T) -> Result<AmbientPoint5<T>> {
    if r < T::zero() || r >= T::one() {
        return Err(Error::Domain("static radius must lie in [0, 1)".into()));
    }
    let s = (T::one() - r * r).sqrt();
    Ok(AmbientPoint5::new(
        s * tp.sinh(),
        s * tp.cosh(),
        r * theta1.cos(),
        r * theta1.sin() * theta2.cos(),
        r * theta1.sin() * theta2.sin(),
    ))
}

/// `−(1−r²)dt′² + dr²/(1−r²) + r²γ̊` in `(t′, r, θ¹, θ²)`.
pub fn static_metric<T: Real>(r: T, theta1: T) -> Result<MetricAtPoint<T>> {
    let f = T::one() - r * r;
    if f.abs() <= T::epsilon() {
        return Err(Error::Domain("static metric degenerates at r = 1".into()));
    }
    let mut g = [[T::zero(); 4]; 4];
    g[0][0] = -f;
    g[1][1] = T::one() / f;
    g[2][2] = r * r;
    g[3][3] = r * r * theta1.sin() * theta1.sin();
    MetricAtPoint::new(g, ChartTag::Static)
}

/// Optical functions `(u*, v*)` of de Sitter.
pub fn ds_optical<T: Real>(p: &AmbientPoint5<T>) -> Result<(T, T)> {
    let r = p.radius();
    let d = p.x - p.t;
    if d == T::zero() || (r - T::one()).abs() <= T::epsilon() {
        return Err(Error::Domain("optical functions undefined on the horizons".into()));
    }
    let w = (p.x + p.t) / d;
    let u = w * (T::one() - r) / (T::one() + r);
    let v = w * (T::one() + r) / (T::one() - r);
    if u == T::zero() || v == T::zero() {
        return Err(Error::Domain("optical functions undefined where x + t = 0".into()));
    }
    let h = lit::<T>(0.5);
    Ok((h * u.abs().ln(), -h * v.abs().ln()))
}

/// Area radius of the sphere `{u*, v*}` in the cosmological region.
pub fn ds_radius<T: Real>(ustar: T, vstar: T) -> Result<T> {
    let s = ustar + vstar;
    if s >= T::zero() {
        return Err(Error::Domain("cosmological region requires u* + v* < 0".into()));
    }
    let e = s.exp();
    Ok((T::one() + e) / (T::one() - e))
}

/// Point of the cosmological region `t > |x|, r > 1` with the given
/// optical coordinates and polar angles.
pub fn ds_double_null_embed<T: Real>(ustar: T, vstar: T, theta1: T, theta2: T) -> Result<AmbientPoint5<T>> {
    let r = ds_radius(ustar, vstar)?;
    let w = (ustar - vstar).exp();
    let d = ((r * r - T::one()) / w).sqrt();
    let h = lit::<T>(0.5);
    Ok(AmbientPoint5::new(
        (w + T::one()) * d * h,
        (w - T::one()) * d * h,
        r * theta1.cos(),
        r * theta1.sin() * theta2.cos(),
        r * theta1.sin() * theta2.sin(),
    ))
}

/// Null lapse of the spherical double-null chart, `Ω² = (r² − 1)/4`.
pub fn ds_double_null_omega2<T: Real>(r: T) -> T {
    (r * r - T::one()) * lit(0.25)
}

pub fn ds_double_null_metric<T: Real>(ustar: T, vstar: T, theta1: T) -> Result<MetricAtPoint<T>> {
    let r = ds_radius(ustar, vstar)?;
    let m = spherical_null_metric(ds_double_null_omega2(r), r, theta1, ChartTag::DoubleNullDS)?;
    Ok(m)
}

/// Closed form of `v_φ(u*, v*; θ¹)`, the optical function of the cones
/// rotated by the angle `φ` in the `(x, x′₁)` plane.
pub fn ellipsoid_vphi<T: Real>(ustar: T, vstar: T, theta1: T, angle_phi: T) -> Result<T> {
    let h = lit::<T>(0.5);
    let a = (ustar - vstar) * h;
    let b = (ustar + vstar) * h;
    let c = theta1.cos();
    let (sp, cp) = angle_phi.sin_cos();
    let r2 = h
        * ((ustar - vstar).cosh() * sp * sp + cp * cp - c * c * sp * sp
            + (ustar + vstar).cosh() * (T::one() - c * c * sp * sp)
            + lit::<T>(2.0) * (ustar.sinh() - vstar.sinh()) * c * sp * cp);
    if r2 <= T::zero() {
        return Err(Error::Domain("r_phi^2 <= 0".into()));
    }
    let rp = r2.sqrt();
    let num = a.cosh() + a.sinh() * cp - b.cosh() * c * sp;
    let den = a.cosh() - a.sinh() * cp + b.cosh() * c * sp;
    let f2d = b.sinh() + rp;
    if den == T::zero() || f2d == T::zero() {
        return Err(Error::Domain("v_phi denominator vanishes".into()));
    }
    Ok(num / den * (rp - b.sinh()) / f2d)
}

/// `v*_φ = −½ log v_φ`.
pub fn ellipsoid_vstar_phi<T: Real>(ustar: T, vstar: T, theta1: T, angle_phi: T) -> Result<T> {
    let v = ellipsoid_vphi(ustar, vstar, theta1, angle_phi)?;
    if v <= T::zero() {
        return Err(Error::Domain("v_phi <= 0".into()));
    }
    Ok(lit::<T>(-0.5) * v.ln())
}

/// Ellipsoidal section `S_(ε,φ)` of the cone `u* = 0`, described by the
/// small-angle closed forms `v*(θ¹) = −a − b cos θ¹`, `r(θ¹) = 2/(a + b cos θ¹)`
/// with `a = |ε|`, `b = φ/(1 + |ε|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidSection<T> {
    pub eps: T,
    pub angle_phi: T,
}

pub fn ellipsoid_section<T: Real>(eps: T, angle_phi: T) -> EllipsoidSection<T> {
    EllipsoidSection { eps: eps.abs(), angle_phi }
}

impl<T: Real> EllipsoidSection<T> {
    pub fn a(&self) -> T {
        self.eps
    }

    pub fn b(&self) -> T {
        self.angle_phi / (T::one() + self.eps)
    }

    pub fn vstar(&self, theta1: T) -> T {
        -self.a() - self.b() * theta1.cos()
    }

    pub fn r(&self, theta1: T) -> T {
        lit::<T>(2.0) / (self.a() + self.b() * theta1.cos())
    }

    /// Whole section lies at finite radius.
    pub fn contained(&self) -> bool {
        self.a() > self.b().abs()
    }

    /// The limiting cone through `|ε| ≤ |φ|` reaches null infinity.
    pub fn touches_infinity(&self) -> bool {
        self.eps <= self.angle_phi.abs()
    }

    /// Closed-form area `16π/(a² − b²)`.
    pub fn area(&self) -> Result<T> {
        if !self.contained() {
            return Err(Error::Domain("section not contained: area infinite".into()));
        }
        let (a, b) = (self.a(), self.b());
        Ok(lit::<T>(16.0) * T::PI() / (a * a - b * b))
    }

    /// Exact `v*(θ¹)` on `u* = 0` solving `v*_φ = −|ε|` by bisection.
    pub fn vstar_exact(&self, theta1: T) -> Result<T> {
        let target = -self.eps;
        let f = |v: T| -> Result<T> { Ok(ellipsoid_vstar_phi(T::zero(), v, theta1, self.angle_phi)? - target) };
        let guess = self.vstar(theta1);
        let mut lo = guess - lit::<T>(0.5) * self.eps.max(self.angle_phi.abs()) - lit(1e-3);
        let mut hi = (guess + lit::<T>(0.5) * self.eps.max(self.angle_phi.abs()) + lit(1e-3)).min(-lit::<T>(1e-12));
        let mut flo = f(lo)?;
        let fhi = f(hi)?;
        if flo * fhi > T::zero() {
            return Err(Error::Convergence("level set not bracketed".into()));
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            let fm = f(mid)?;
            if fm == T::zero() || (hi - lo).abs() < T::epsilon() * lit(4.0) {
                return Ok(mid);
            }
            if (fm > T::zero()) == (flo > T::zero()) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }
}

// ------------------------------------------------- Schwarzschild–de Sitter

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdSParams<T> {
    pub lambda: T,
    pub m: T,
}

impl<T: Real> SdSParams<T> {
    pub fn new(lambda: T, m: T) -> Result<Self> {
        if lambda <= T::zero() {
            return Err(Error::Domain("cosmological constant must be positive".into()));
        }
        if m < T::zero() {
            return Err(Error::Domain("mass must be non-negative".into()));
        }
        let p = Self { lambda, m };
        if m >= p.mass_bound() {
            return Err(Error::NoHorizon { m: crate::scalar::to_f64(m), lambda: crate::scalar::to_f64(lambda) });
        }
        Ok(p)
    }

    /// `1/(3√Λ)`.
    pub fn mass_bound(&self) -> T {
        T::one() / (lit::<T>(3.0) * self.lambda.sqrt())
    }

    /// `F(r) = Λr²/3 + 2m/r − 1`, equal to `Ω²` in the EF gauge.
    pub fn f(&self, r: T) -> T {
        self.lambda * r * r / lit(3.0) + lit::<T>(2.0) * self.m / r - T::one()
    }

    pub fn df(&self, r: T) -> T {
        lit::<T>(2.0) * self.lambda * r / lit(3.0) - lit::<T>(2.0) * self.m / (r * r)
    }

    /// `ρ = −2m/r³`.
    pub fn rho(&self, r: T) -> T {
        lit::<T>(-2.0) * self.m / (r * r * r)
    }
}

/// Horizon radii ordered `r̄_C < 0 ≤ r_H < r_C`.
pub fn sds_horizons<T: Real>(p: &SdSParams<T>) -> Result<(T, T, T)> {
    if p.m >= p.mass_bound() || p.m < T::zero() {
        return Err(Error::NoHorizon { m: crate::scalar::to_f64(p.m), lambda: crate::scalar::to_f64(p.lambda) });
    }
    let three = lit::<T>(3.0);
    let rc0 = (three / p.lambda).sqrt();
    if p.m == T::zero() {
        return Ok((-rc0, T::zero(), rc0));
    }
    // r³ + P r + Q = 0 with P = −3/Λ, Q = 6m/Λ
    let pp = -three / p.lambda;
    let qq = lit::<T>(6.0) * p.m / p.lambda;
    let amp = lit::<T>(2.0) * (-pp / three).sqrt();
    let arg = (three * qq / (lit::<T>(2.0) * pp) * (-three / pp).sqrt()).max(-T::one()).min(T::one());
    let base = arg.acos() / three;
    let tau = lit::<T>(2.0) * T::PI() / three;
    let mut roots = [amp * base.cos(), amp * (base - tau).cos(), amp * (base - tau - tau).cos()];
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = *r * *r * *r + pp * *r + qq;
            let df = three * *r * *r + pp;
            if df != T::zero() {
                *r = *r - f / df;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((roots[0], roots[1], roots[2]))
}

/// Vieta residuals `(Σr, Σ_{i<j} r_i r_j + 3/Λ, Πr + 6m/Λ)`.
pub fn vieta_residuals<T: Real>(p: &SdSParams<T>, roots: (T, T, T)) -> [T; 3] {
    let (a, b, c) = roots;
    [
        a + b + c,
        a * b + b * c + a * c + lit::<T>(3.0) / p.lambda,
        a * b * c + lit::<T>(6.0) * p.m / p.lambda,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SdsGauge {
    EF,
    Kruskal,
    InitialData,
}

impl SdsGauge {
    pub fn tag(self) -> ChartTag {
        match self {
            SdsGauge::EF => ChartTag::EF,
            SdsGauge::Kruskal => ChartTag::Kruskal,
            SdsGauge::InitialData => ChartTag::InitialData,
        }
    }
}

/// Values of a spherically symmetric double-null chart at a point:
/// `r`, `Ω`, the first derivatives of `r` and of `log Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalData<T> {
    pub r: T,
    pub omega: T,
    pub dr_du: T,
    pub dr_dv: T,
    pub dlog_omega_du: T,
    pub dlog_omega_dv: T,
}

/// Horizon structure and tortoise coordinate of a Schwarzschild–de Sitter
/// solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdsGeometry<T> {
    pub params: SdSParams<T>,
    pub r_bar: T,
    pub r_h: T,
    pub r_c: T,
    pub kappa: T,
    pub alpha_h: T,
    pub alpha_bar: T,
}

/// Guard on `Ω²` in the EF chart.
pub const HORIZON_GUARD: f64 = 1e-10;

impl<T: Real> SdsGeometry<T> {
    pub fn new(params: SdSParams<T>) -> Result<Self> {
        let (r_bar, r_h, r_c) = sds_horizons(&params)?;
        let kappa = params.df(r_c) * lit(0.5);
        let alpha_h = if params.m == T::zero() { T::zero() } else { lit::<T>(-2.0) * kappa / params.df(r_h) };
        Ok(Self { params, r_bar, r_h, r_c, kappa, alpha_h, alpha_bar: T::one() - alpha_h })
    }

    pub fn f(&self, r: T) -> T {
        self.params.f(r)
    }

    /// Tortoise coordinate normalised by `r* → 0⁻` as `r → ∞`.
    pub fn rstar(&self, r: T) -> Result<T> {
        if r <= self.r_c {
            return Err(Error::Domain("r* requires r > r_C".into()));
        }
        Ok(self.log_kruskal_product(r) / (lit::<T>(2.0) * self.kappa))
    }

    /// `log[(r − r_C)(r − r_H)^{−α_H}(r + |r̄_C|)^{−ᾱ_C}]`, written with
    /// `log(1 + x)` so that it stays accurate at large `r`.
    fn log_kruskal_product(&self, r: T) -> T {
        let x = T::one() / r;
        (-self.r_c * x).ln_1p() - self.alpha_h * (-self.r_h * x).ln_1p() - self.alpha_bar * (self.r_bar.abs() * x).ln_1p()
    }

    /// `u_K v_K` as a function of `r > r_H`.
    pub fn kruskal_product(&self, r: T) -> T {
        (r - self.r_c) * (r - self.r_h).powf(-self.alpha_h) * (r + self.r_bar.abs()).powf(-self.alpha_bar)
    }

    /// Inverse of [`Self::rstar`] by safeguarded Newton iteration.
    pub fn r_of_rstar(&self, rstar: T) -> Result<T> {
        if rstar >= T::zero() {
            return Err(Error::Domain("r* must be negative".into()));
        }
        let g = |r: T| self.log_kruskal_product(r) / (lit::<T>(2.0) * self.kappa) - rstar;
        let mut lo = self.r_c;
        let mut hi = self.r_c + T::one();
        let mut it = 0;
        while g(hi) < T::zero() {
            lo = hi;
            hi = hi * lit(4.0);
            it += 1;
            if it > 2000 || !hi.is_finite() {
                return Err(Error::Convergence("r(r*) bracket".into()));
            }
        }
        let mut r = if -rstar < lit(1e-3) {
            // r* ≈ −3/(Λr) far out
            (lit::<T>(-3.0) / (self.params.lambda * rstar)).max(lo).min(hi)
        } else {
            (lo + hi) * lit(0.5)
        };
        for _ in 0..200 {
            let val = g(r);
            if val > T::zero() {
                hi = hi.min(r);
            } else {
                lo = lo.max(r);
            }
            let fr = self.f(r);
            let mut next = r - val * fr;
            if !(next > lo && next < hi) {
                next = (lo + hi) * lit(0.5);
            }
            if (next - r).abs() <= lit::<T>(4.0) * T::epsilon() * r {
                return Ok(next);
            }
            r = next;
        }
        if (hi - lo) <= lit::<T>(1e-12) * hi {
            return Ok(r);
        }
        Err(Error::Convergence("r(r*) Newton iteration".into()))
    }

    /// Inverse of [`Self::kruskal_product`] on `(r_H, ∞)`.
    pub fn r_of_kruskal_product(&self, p: T) -> Result<T> {
        if p >= T::one() {
            return Err(Error::Domain("u_K v_K must be < 1".into()));
        }
        if p > T::zero() {
            return self.r_of_rstar(p.ln() / (lit::<T>(2.0) * self.kappa));
        }
        if p == T::zero() {
            return Ok(self.r_c);
        }
        // static region between the horizons: bisection on a monotone map
        let mut lo = self.r_h;
        let mut hi = self.r_c;
        for _ in 0..300 {
            let mid = (lo + hi) * lit(0.5);
            if self.kruskal_product(mid) > p {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }

    /// `d log Ω_K² / dr`.
    fn dlog_omega_k2_dr(&self, r: T) -> T {
        (T::one() + self.alpha_h) / (r - self.r_h) + (T::one() + self.alpha_bar) / (r + self.r_bar.abs()) - T::one() / r
    }

    /// `Ω_K² = ¼(Λ/3)κ⁻²(r − r_H)^{1+α_H}(r + |r̄_C|)^{1+ᾱ_C}/r`.
    pub fn omega_k2(&self, r: T) -> T {
        lit::<T>(0.25) * self.params.lambda / (lit::<T>(3.0) * self.kappa * self.kappa)
            * (r - self.r_h).powf(T::one() + self.alpha_h)
            * (r + self.r_bar.abs()).powf(T::one() + self.alpha_bar)
            / r
    }

    /// EF coordinate as a function of an initial-data coordinate.
    fn id_to_ef(&self, x: T) -> Result<(T, T)> {
        let two_k = lit::<T>(2.0) * self.kappa;
        if x >= T::zero() {
            Ok((x / two_k, T::one() / two_k))
        } else if x > -T::one() {
            Ok(((T::one() + x).ln() / two_k, T::one() / (two_k * (T::one() + x))))
        } else {
            Err(Error::Domain("initial-data coordinate must exceed -1".into()))
        }
    }

    /// Converts gauge coordinates `(u, v)` to EF `(u*, v*)`.
    pub fn to_ef(&self, gauge: SdsGauge, u: T, v: T) -> Result<(T, T)> {
        let two_k = lit::<T>(2.0) * self.kappa;
        match gauge {
            SdsGauge::EF => Ok((u, v)),
            SdsGauge::Kruskal => {
                if u <= T::zero() || v <= T::zero() {
                    return Err(Error::Domain("EF coordinates need u_K, v_K > 0".into()));
                }
                Ok((u.ln() / two_k, v.ln() / two_k))
            }
            SdsGauge::InitialData => Ok((self.id_to_ef(u)?.0, self.id_to_ef(v)?.0)),
        }
    }

    /// Converts EF `(u*, v*)` to gauge coordinates.
    pub fn from_ef(&self, gauge: SdsGauge, us: T, vs: T) -> (T, T) {
        let two_k = lit::<T>(2.0) * self.kappa;
        let id = |x: T| if x >= T::zero() { two_k * x } else { (two_k * x).exp() - T::one() };
        match gauge {
            SdsGauge::EF => (us, vs),
            SdsGauge::Kruskal => ((two_k * us).exp(), (two_k * vs).exp()),
            SdsGauge::InitialData => (id(us), id(vs)),
        }
    }

    /// Closed-form chart data in the requested gauge.
    pub fn spherical(&self, gauge: SdsGauge, u: T, v: T) -> Result<SphericalData<T>> {
        let h = lit::<T>(0.5);
        match gauge {
            SdsGauge::EF => {
                let r = self.r_of_rstar(u + v)?;
                let f = self.f(r);
                if f <= lit(HORIZON_GUARD) {
                    return Err(Error::HorizonProximity(crate::scalar::to_f64(f)));
                }
                let dl = h * self.params.df(r);
                Ok(SphericalData { r, omega: f.sqrt(), dr_du: f, dr_dv: f, dlog_omega_du: dl, dlog_omega_dv: dl })
            }
            SdsGauge::Kruskal => {
                if u < T::zero() || v < T::zero() {
                    return Err(Error::Domain("Kruskal chart restricted to u_K, v_K >= 0".into()));
                }
                let r = self.r_of_kruskal_product(u * v)?;
                let om2 = self.omega_k2(r);
                let two_k = lit::<T>(2.0) * self.kappa;
                let dr_du = two_k * om2 * v;
                let dr_dv = two_k * om2 * u;
                let dl = h * self.dlog_omega_k2_dr(r);
                Ok(SphericalData {
                    r,
                    omega: om2.sqrt(),
                    dr_du,
                    dr_dv,
                    dlog_omega_du: dl * dr_du,
                    dlog_omega_dv: dl * dr_dv,
                })
            }
            SdsGauge::InitialData => {
                let (us, du) = self.id_to_ef(u)?;
                let (vs, dv) = self.id_to_ef(v)?;
                let r = self.r_of_rstar(us + vs)?;
                let f = self.f(r);
                let om2 = f * du * dv;
                let df = self.params.df(r);
                // d/du log(du*/du̲) = −1/(1+u̲) on the Kruskal-type patch
                let corr = |x: T| if x >= T::zero() { T::zero() } else { -T::one() / (T::one() + x) };
                Ok(SphericalData {
                    r,
                    omega: om2.sqrt(),
                    dr_du: f * du,
                    dr_dv: f * dv,
                    dlog_omega_du: h * (df * du + corr(u)),
                    dlog_omega_dv: h * (df * dv + corr(v)),
                })
            }
        }
    }

    /// Metric at a chart point `(u, v, θ¹, θ²)` of the given gauge.
    pub fn metric(&self, gauge: SdsGauge, x: &[T; 4]) -> Result<MetricAtPoint<T>> {
        let (r, om2) = self.r_and_omega2(gauge, x[0], x[1])?;
        spherical_null_metric(om2, r, x[2], gauge.tag())
    }

    /// `(r, Ω²)` only; cheaper than [`Self::spherical`] for repeated metric
    /// evaluation in finite differences.
    pub fn r_and_omega2(&self, gauge: SdsGauge, u: T, v: T) -> Result<(T, T)> {
        match gauge {
            SdsGauge::EF => {
                let r = self.r_of_rstar(u + v)?;
                let f = self.f(r);
                if f <= lit(HORIZON_GUARD) {
                    return Err(Error::HorizonProximity(crate::scalar::to_f64(f)));
                }
                Ok((r, f))
            }
            SdsGauge::Kruskal => {
                let r = self.r_of_kruskal_product(u * v)?;
                Ok((r, self.omega_k2(r)))
            }
            SdsGauge::InitialData => {
                let (us, du) = self.id_to_ef(u)?;
                let (vs, dv) = self.id_to_ef(v)?;
                let r = self.r_of_rstar(us + vs)?;
                Ok((r, self.f(r) * du * dv))
            }
        }
    }
}

/// Tortoise coordinate.
pub fn sds_rstar<T: Real>(p: &SdSParams<T>, r: T) -> Result<T> {
    SdsGeometry::new(*p)?.rstar(r)
}

/// Inverse tortoise coordinate.
pub fn sds_r_of_rstar<T: Real>(p: &SdSParams<T>, rstar: T) -> Result<T> {
    SdsGeometry::new(*p)?.r_of_rstar(rstar)
}

/// Metric, lapse and `(∂_u r, ∂_v r)` of an SdS gauge at a chart point.
pub fn sds_chart<T: Real>(gauge: SdsGauge, p: &SdSParams<T>, point: &ChartPoint<T>) -> Result<(MetricAtPoint<T>, T, (T, T))> {
    if point.tag != gauge.tag() {
        return Err(Error::Domain(format!("chart point tagged {:?}, gauge {:?}", point.tag, gauge)));
    }
    let geo = SdsGeometry::new(*p)?;
    let sd = geo.spherical(gauge, point.coords[0], point.coords[1])?;
    let m = spherical_null_metric(sd.omega * sd.omega, sd.r, point.coords[2], gauge.tag())?;
    Ok((m, sd.omega, (sd.dr_du, sd.dr_dv)))
}

/// Metric of any chart tag at a chart point (SdS tags use `params`,
/// de Sitter tags ignore it).
pub fn chart_metric<T: Real>(point: &ChartPoint<T>, params: Option<&SdSParams<T>>) -> Result<MetricAtPoint<T>> {
    let c = point.coords;
    match point.tag {
        ChartTag::Stereographic => stereographic_metric(c[0], [c[1], c[2], c[3]]),
        ChartTag::Static => static_metric(c[1], c[2]),
        ChartTag::DoubleNullDS => ds_double_null_metric(c[0], c[1], c[2]),
        tag => {
            let p = params.ok_or_else(|| Error::Config("SdS chart requires parameters".into()))?;
            let gauge = match tag {
                ChartTag::EF => SdsGauge::EF,
                ChartTag::Kruskal => SdsGauge::Kruskal,
                _ => SdsGauge::InitialData,
            };
            SdsGeometry::new(*p)?.metric(gauge, &c)
        }
    }
}
