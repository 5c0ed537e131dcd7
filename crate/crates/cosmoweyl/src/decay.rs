//! Integral-inequality engine turning a positive bulk term into polynomial
//! decay.
//!
//! The model inequality for a positive `f` is
//!
//! ```text
//! f(r₂) + ∫_{r₁}^{r₂} [κ(r) f(r)/r − C h(r)/r] dr ≤ f(r₁),   r₂ > r₁ ≥ r₀,
//! ```
//!
//! with `0 < κ₀ ≤ κ ≤ κ₁`. With `K₁ = ∫_{r₀}^∞ (κ₁ − κ)/r dr` and
//! `H₁ = ∫_{r₀}^∞ |h| r^{κ₁−1} dr` both finite it yields
//! `(r^{κ₁} − r₀^{κ₁}) f(r) ≤ (κ₁ e^{K₁}/κ₀)(r₀^{κ₁} f(r₀) + C H₁)`, hence
//! `f(r) ≤ C_* r^{−κ₁}` for `r ≥ 2r₀`.

use crate::scalar::{from_usize, lit, Real};
use crate::{Error, Result};

/// Absolute tolerance of the adaptive Simpson rule.
pub const SIMPSON_TOL: f64 = 1e-10;
const MAX_DECADES: usize = 64;
const MAX_DEPTH: usize = 48;

/// Inputs of the integral inequality.
pub struct DecayProblem<'a, T> {
    pub kappa: &'a dyn Fn(T) -> T,
    pub kappa0: T,
    pub kappa1: T,
    pub h: &'a dyn Fn(T) -> T,
    pub f0: T,
    pub r0: T,
    pub c: T,
}

impl<'a, T: Real> DecayProblem<'a, T> {
    /// Checks the scalar invariants and samples `κ` against its bounds on
    /// a logarithmic grid over `[r₀, 10⁸ r₀]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa0 > T::zero()) || self.kappa1 < self.kappa0 || !self.kappa1.is_finite() {
            return Err(Error::Domain(format!("need 0 < kappa0 <= kappa1, got {} and {}", self.kappa0, self.kappa1)));
        }
        if !(self.f0 >= T::zero()) || !(self.r0 > T::zero()) || !(self.c >= T::zero()) {
            return Err(Error::Domain("need f0 >= 0, r0 > 0, C >= 0".into()));
        }
        let slack = lit::<T>(1e-12) * self.kappa1;
        for i in 0..=400 {
            let r = self.r0 * lit::<T>(10.0).powf(from_usize::<T>(i) / lit(50.0));
            let k = (self.kappa)(r);
            if !(k >= self.kappa0 - slack && k <= self.kappa1 + slack) {
                return Err(Error::Domain(format!("kappa({r}) = {k} outside [{}, {}]", self.kappa0, self.kappa1)));
            }
        }
        Ok(())
    }
}

/// Output of [`gronwall_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallBound<T> {
    pub k1: T,
    pub h1: T,
    pub kappa0: T,
    pub kappa1: T,
    pub r0: T,
    /// `(κ₁ e^{K₁}/κ₀)(r₀^{κ₁} f₀ + C H₁)`.
    pub prefactor: T,
    /// Constant of `f ≤ C_* r^{−κ₁}` valid on `r ≥ 2r₀`.
    pub constant: T,
}

impl<T: Real> GronwallBound<T> {
    /// Assembles the constants from already-evaluated integrals.
    pub fn from_integrals(k1: T, h1: T, kappa0: T, kappa1: T, f0: T, r0: T, c: T) -> Self {
        let prefactor = kappa1 * k1.exp() / kappa0 * (r0.powf(kappa1) * f0 + c * h1);
        let constant = prefactor / (T::one() - lit::<T>(2.0).powf(-kappa1));
        Self { k1, h1, kappa0, kappa1, r0, prefactor, constant }
    }

    /// `C_* r^{−κ₁}`; only defined for `r ≥ 2r₀`.
    pub fn bound(&self, r: T) -> Result<T> {
        if r < self.r0 + self.r0 {
            return Err(Error::Domain(format!("bound valid for r >= 2 r0 = {}, got {r}", self.r0 + self.r0)));
        }
        Ok(self.constant * r.powf(-self.kappa1))
    }

    /// The sharper intermediate form `prefactor / (r^{κ₁} − r₀^{κ₁})`, valid for `r > r₀`.
    pub fn raw_bound(&self, r: T) -> Result<T> {
        if r <= self.r0 {
            return Err(Error::Domain(format!("raw bound needs r > r0, got {r}")));
        }
        Ok(self.prefactor / (r.powf(self.kappa1) - self.r0.powf(self.kappa1)))
    }

    /// Loss factor built into the derivation: `(κ₁/κ₀) e^{K₁} / (1 − 2^{−κ₁})`.
    pub fn slack(&self) -> T {
        self.kappa1 / self.kappa0 * self.k1.exp() / (T::one() - lit::<T>(2.0).powf(-self.kappa1))
    }
}

/// Evaluates `K₁`, `H₁` and the decay constant.
pub fn gronwall_bound<T: Real>(p: &DecayProblem<'_, T>) -> Result<GronwallBound<T>> {
    p.validate()?;
    let k = |r: T| (p.kappa1 - (p.kappa)(r)) / r;
    let k1 = integrate_to_infinity(&k, p.r0).map_err(|e| relabel(e, "K"))?;
    let hw = |r: T| (p.h)(r).abs() * r.powf(p.kappa1 - T::one());
    let h1 = integrate_to_infinity(&hw, p.r0).map_err(|e| relabel(e, "H"))?;
    Ok(GronwallBound::from_integrals(k1.max(T::zero()), h1, p.kappa0, p.kappa1, p.f0, p.r0, p.c))
}

fn relabel(e: Error, what: &str) -> Error {
    match e {
        Error::DivergentWeight(s) => Error::DivergentWeight(format!("{what}: {s}")),
        other => other,
    }
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T) -> T {
    let m = (a + b) * lit(0.5);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: usize) -> T {
    let m = (a + b) * lit(0.5);
    let (lm, rm) = ((a + m) * lit(0.5), (m + b) * lit(0.5));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / lit(6.0) * (fa + lit::<T>(4.0) * flm + fm);
    let right = (b - m) / lit(6.0) * (fm + lit::<T>(4.0) * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= lit::<T>(15.0) * tol || !delta.is_finite() {
        return left + right + delta / lit(15.0);
    }
    let half = tol * lit(0.5);
    simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1) + simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1)
}

/// `∫_{r₀}^∞ g dr`, decade by decade in `log r`. A geometric tail is added
/// once successive decades shrink; a decade ratio that stays near one
/// (power tail no faster than `r⁻¹`) is reported as divergent.
pub fn integrate_to_infinity<T: Real>(g: &dyn Fn(T) -> T, r0: T) -> Result<T> {
    let ln10 = lit::<T>(10.0).ln();
    let t0 = r0.ln();
    let gt = |t: T| {
        let r = t.exp();
        g(r) * r
    };
    let tol = lit::<T>(SIMPSON_TOL);
    let mut sum = T::zero();
    let mut prev: Option<T> = None;
    for k in 0..MAX_DECADES {
        let a = t0 + ln10 * from_usize(k);
        let ik = adaptive_simpson(&gt, a, a + ln10, tol / lit(4.0));
        if !ik.is_finite() {
            return Err(Error::DivergentWeight(format!("non-finite integrand in decade {k}")));
        }
        sum = sum + ik;
        if let Some(ip) = prev {
            if ik.abs() <= lit::<T>(1e-14) * sum.abs().max(lit(1e-300)) || (ik == T::zero() && ip == T::zero() && k >= 3) {
                return Ok(sum);
            }
            if ip != T::zero() {
                let rho = (ik / ip).abs();
                if k >= 4 && rho >= T::one() - lit(1e-6) {
                    let p = rho.log10() - T::one();
                    return Err(Error::DivergentWeight(format!("tail decays like r^{p}")));
                }
                let tail = ik.abs() * rho / (T::one() - rho);
                if rho < T::one() && tail <= tol {
                    return Ok(sum + ik * rho / (T::one() - rho));
                }
            }
        }
        prev = Some(ik);
    }
    Err(Error::DivergentWeight(format!("no convergence after {MAX_DECADES} decades")))
}

/// Solves the equality case `r f′ = −κ f + C h` by classical RK4 in
/// `log r`, returning `n + 1` samples from `r₀` to `r1`.
pub fn solve_equality<T: Real>(p: &DecayProblem<'_, T>, r1: T, n: usize) -> Result<Vec<(T, T)>> {
    p.validate()?;
    if !(r1 > p.r0) || n == 0 {
        return Err(Error::Domain("need r1 > r0 and n > 0".into()));
    }
    let rhs = |t: T, f: T| {
        let r = t.exp();
        -(p.kappa)(r) * f + p.c * (p.h)(r)
    };
    let (t0, t1) = (p.r0.ln(), r1.ln());
    let dt = (t1 - t0) / from_usize(n);
    let two = lit::<T>(2.0);
    let mut out = Vec::with_capacity(n + 1);
    let mut f = p.f0;
    out.push((p.r0, f));
    for i in 0..n {
        let t = t0 + dt * from_usize(i);
        let k1 = rhs(t, f);
        let k2 = rhs(t + dt / two, f + dt / two * k1);
        let k3 = rhs(t + dt / two, f + dt / two * k2);
        let k4 = rhs(t + dt, f + dt * k3);
        f = f + dt / lit(6.0) * (k1 + two * k2 + two * k3 + k4);
        let r = if i + 1 == n { r1 } else { (t + dt).exp() };
        out.push((r, f));
    }
    Ok(out)
}

/// Whether a sampled sequence is a finite window or stands for the whole
/// half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRange {
    /// Claim restricted to the sampled interval: a finite supremum suffices.
    Bounded,
    /// Claim about all `r ≥ r₀`: the supremum must also be attained in the
    /// inner half (in `log r`) of the samples, so the weighted sequence is
    /// not still growing at the end.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck<T> {
    pub sup_c: T,
    pub r_at_sup: T,
    pub holds: bool,
}

/// Empirical decay check: `sup r^{κ₁} f(r)` over the samples.
pub fn verify_decay<T: Real>(samples: &[(T, T)], kappa1: T, range: SampleRange) -> Result<DecayCheck<T>> {
    if samples.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(samples[0].0 > T::zero()) {
        return Err(Error::Domain("samples must be positive and increasing in r".into()));
    }
    let mut sup = T::neg_infinity();
    let mut arg = samples[0].0;
    let mut finite = true;
    for &(r, f) in samples {
        let w = r.powf(kappa1) * f;
        finite &= w.is_finite();
        if w > sup {
            sup = w;
            arg = r;
        }
    }
    let (lo, hi) = (samples[0].0.ln(), samples[samples.len() - 1].0.ln());
    let inner = arg.ln() <= (lo + hi) * lit(0.5);
    let holds = finite
        && match range {
            SampleRange::Bounded => true,
            SampleRange::Unbounded => inner,
        };
    Ok(DecayCheck { sup_c: sup, r_at_sup: arg, holds })
}
