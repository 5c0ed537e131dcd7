//! Bel-Robinson tensor, energy currents of the multipliers `M`, `M_a` and
//! `N`, their deformation tensors, and the bulk term `K = K₊ + K₋`.
//!
//! Frame components follow [`crate::weyl`]: index `2 ↔ e3`, `3 ↔ e4`.
//! Deformation tensors are stored with lowered indices.

use crate::charts::{SdsGauge, SdsGeometry};
use crate::error::{Error, Result};
use crate::fd;
use crate::nullframe::{BoostLaw, StructureCoefficients};
use crate::scalar::{lit, Real};
use crate::tensor::{
    self, dot2, madd, mdual, mscale, mv, norm2_sq, null_frame_inverse, sym2, vadd, vdot, vdual, vnorm_sq, vscale,
    zero_rank4, Mat2, Mat4, Rank4, Vec2,
};
use crate::weyl::{boost_weyl, reconstruct, Weyl4, WeylNull};

/// `Q_abcd = W_a p c q W_b^p_d^q + *W_a p c q *W_b^p_d^q` in the null frame.
pub fn bel_robinson<T: Real>(w: &Weyl4<T>) -> Rank4<T> {
    let gi = null_frame_inverse::<T>();
    let d = w.dual();
    let mut q = zero_rank4::<T>();
    for t in [&w.w, &d.w] {
        // raise the 2nd and 4th slots once
        let mut up = zero_rank4::<T>();
        for b in 0..4 {
            for p in 0..4 {
                for dd in 0..4 {
                    for s in 0..4 {
                        let mut v = T::zero();
                        for r in 0..4 {
                            for u in 0..4 {
                                if gi[p][r] != T::zero() && gi[s][u] != T::zero() {
                                    v = v + gi[p][r] * gi[s][u] * t[b][r][dd][u];
                                }
                            }
                        }
                        up[b][p][dd][s] = v;
                    }
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for dd in 0..4 {
                        let mut v = T::zero();
                        for p in 0..4 {
                            for s in 0..4 {
                                v = v + t[a][p][c][s] * up[b][p][dd][s];
                            }
                        }
                        q[a][b][c][dd] = q[a][b][c][dd] + v;
                    }
                }
            }
        }
    }
    q
}

/// `Q(X, Y, Z, V)` for frame-component vectors.
pub fn q_contract<T: Real>(q: &Rank4<T>, x: &[T; 4], y: &[T; 4], z: &[T; 4], v: &[T; 4]) -> T {
    let mut s = T::zero();
    for a in 0..4 {
        if x[a] == T::zero() {
            continue;
        }
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    s = s + q[a][b][c][d] * x[a] * y[b] * z[c] * v[d];
                }
            }
        }
    }
    s
}

/// `(Q3333, Q4333, Q3344, Q3444, Q4444) = (2|ᾱ|², 4|β̄|², 4(ρ²+σ²), 4|β|², 2|α|²)`.
pub fn q_null_components<T: Real>(w: &WeylNull<T>) -> [T; 5] {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    [
        two * norm2_sq(&w.abar),
        four * vnorm_sq(&w.bbar),
        four * (w.rho * w.rho + w.sigma * w.sigma),
        four * vnorm_sq(&w.b),
        two * norm2_sq(&w.a),
    ]
}

/// Energy density with its per-component split `(ᾱ, β̄, ρσ, β, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDensity<T> {
    pub value: T,
    pub breakdown: [T; 5],
}

impl<T: Real> FluxDensity<T> {
    fn from_terms(breakdown: [T; 5]) -> Self {
        let value = breakdown.iter().fold(T::zero(), |s, &x| s + x);
        Self { value, breakdown }
    }
}

fn check_positive<T: Real>(x: T, what: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Positivity(format!("{what} must be positive, got {x}")))
    }
}

/// `Q(n, M_q, M_q, M_q)` on `Σ_r`, with `n = ½(q e3 + q⁻¹ e4)`.
pub fn flux_sigma_density<T: Real>(w: &WeylNull<T>, q: T, lapse: T) -> Result<FluxDensity<T>> {
    check_positive(q, "q")?;
    check_positive(lapse, "Omega")?;
    let wq = boost_weyl(q, w);
    let pre = T::one() / (lit::<T>(8.0) * lapse * lapse * lapse);
    let e8 = lit::<T>(8.0);
    Ok(FluxDensity::from_terms([
        pre * norm2_sq(&wq.abar),
        pre * e8 * vnorm_sq(&wq.bbar),
        pre * lit::<T>(12.0) * (w.rho * w.rho + w.sigma * w.sigma),
        pre * e8 * vnorm_sq(&wq.b),
        pre * norm2_sq(&wq.a),
    ]))
}

/// `Q(n, M, M, M)` for the unboosted multiplier `M` and the normal of `Σ_r`.
pub fn flux_m_density<T: Real>(w: &WeylNull<T>, q: T, lapse: T) -> Result<FluxDensity<T>> {
    check_positive(q, "q")?;
    check_positive(lapse, "Omega")?;
    let qi = T::one() / q;
    let pre = T::one() / (lit::<T>(8.0) * lapse * lapse * lapse);
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    Ok(FluxDensity::from_terms([
        pre * q * norm2_sq(&w.abar),
        pre * two * (three * q + qi) * vnorm_sq(&w.bbar),
        pre * lit::<T>(6.0) * (q + qi) * (w.rho * w.rho + w.sigma * w.sigma),
        pre * two * (q + three * qi) * vnorm_sq(&w.b),
        pre * qi * norm2_sq(&w.a),
    ]))
}

/// `Ω Q(L̂, M, M, M)`, the flux density through the outgoing cones.
pub fn flux_null_density<T: Real>(w: &WeylNull<T>, lapse: T) -> Result<T> {
    check_positive(lapse, "Omega")?;
    let s = lit::<T>(6.0);
    Ok((lit::<T>(2.0) * vnorm_sq(&w.bbar) + s * (w.rho * w.rho + w.sigma * w.sigma) + s * vnorm_sq(&w.b) + norm2_sq(&w.a))
        / (lit::<T>(4.0) * lapse * lapse))
}

/// Null components of a trace-free symmetric 2-tensor in a null frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationNull<T> {
    /// `π̂₃₃`
    pub nbar: T,
    /// `π̂₄₄`
    pub nn: T,
    /// `π̂₃₄`
    pub j: T,
    /// `π̂₃A`
    pub mbar: Vec2<T>,
    /// `π̂₄A`
    pub mm: Vec2<T>,
    /// `π̂_AB`
    pub ii: Mat2<T>,
}

impl<T: Real> DeformationNull<T> {
    pub fn from_frame(p: &Mat4<T>) -> Self {
        Self {
            nbar: p[2][2],
            nn: p[3][3],
            j: p[2][3],
            mbar: [p[2][0], p[2][1]],
            mm: [p[3][0], p[3][1]],
            ii: [[p[0][0], p[0][1]], [p[1][0], p[1][1]]],
        }
    }

    pub fn to_frame(&self) -> Mat4<T> {
        let mut p = [[T::zero(); 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                p[a][b] = self.ii[a][b];
            }
            p[a][2] = self.mbar[a];
            p[2][a] = self.mbar[a];
            p[a][3] = self.mm[a];
            p[3][a] = self.mm[a];
        }
        p[2][2] = self.nbar;
        p[3][3] = self.nn;
        p[2][3] = self.j;
        p[3][2] = self.j;
        p
    }

    /// `π̂^{ab}` with the frame metric; `π̂^{33} = ¼π̂₄₄` and so on.
    pub fn raised(&self) -> Mat4<T> {
        let gi = null_frame_inverse::<T>();
        let lo = self.to_frame();
        let mut up = [[T::zero(); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let mut v = T::zero();
                for c in 0..4 {
                    for d in 0..4 {
                        v = v + gi[a][c] * gi[b][d] * lo[c][d];
                    }
                }
                up[a][b] = v;
            }
        }
        up
    }

    /// `g^{ab} π̂_ab`, zero for a trace-free tensor.
    pub fn trace(&self) -> T {
        tensor::trace2(&self.ii) - self.j
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        tensor::max_abs(&{
            let (a, b) = (self.to_frame(), other.to_frame());
            let mut d = [[T::zero(); 4]; 4];
            for i in 0..4 {
                for k in 0..4 {
                    d[i][k] = a[i][k] - b[i][k];
                }
            }
            d
        })
    }
}

/// Boost data with possibly absent derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialBoost<T> {
    pub a: T,
    pub e3_a: Option<T>,
    pub e4_ainv: Option<T>,
    pub dlog_a: Option<Vec2<T>>,
}

impl<T: Real> PartialBoost<T> {
    pub fn complete(&self) -> Result<BoostLaw<T>> {
        check_positive(self.a, "boost parameter")?;
        Ok(BoostLaw {
            a: self.a,
            e3_a: self.e3_a.ok_or(Error::MissingDerivative("L̄̂a"))?,
            e4_ainv: self.e4_ainv.ok_or(Error::MissingDerivative("L̂a⁻¹"))?,
            dlog_a: self.dlog_a.ok_or(Error::MissingDerivative("d̸ log a"))?,
        })
    }
}

impl<T: Real> From<BoostLaw<T>> for PartialBoost<T> {
    fn from(b: BoostLaw<T>) -> Self {
        Self { a: b.a, e3_a: Some(b.e3_a), e4_ainv: Some(b.e4_ainv), dlog_a: Some(b.dlog_a) }
    }
}

/// The multiplier and commutator vector fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier<T> {
    /// `M = (2Ω)⁻¹(L̄̂ + L̂)`
    M,
    /// `M_a = (2Ω)⁻¹(a L̄̂ + a⁻¹ L̂)`
    Ma(PartialBoost<T>),
    /// `N = ½Ω(q L̄̂ + q⁻¹ L̂)`
    N(PartialBoost<T>),
}

fn deformation_ma<T: Real>(b: &BoostLaw<T>, c: &StructureCoefficients<T>) -> DeformationNull<T> {
    let (a, ai, om) = (b.a, T::one() / b.a, c.lapse);
    let h = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let s = a * c.tr_chib() + ai * c.tr_chi() - b.e3_a - b.e4_ainv;
    let ii = madd(&madd(&mscale(a, &c.chib_hat()), &mscale(ai, &c.chi_hat())), &sym2(s / four, T::zero(), s / four));
    DeformationNull {
        nbar: (four * a * c.omegab_hat + two * b.e3_a) / om,
        nn: (four * ai * c.omega_hat + two * b.e4_ainv) / om,
        j: h * s / om,
        mbar: vscale(T::one() / om, &vadd(&vscale(two, &c.eta), &b.dlog_a)),
        mm: vscale(T::one() / om, &vadd(&vscale(two, &c.etab), &vscale(-T::one(), &b.dlog_a))),
        ii: mscale(T::one() / om, &ii),
    }
}

fn deformation_n<T: Real>(b: &BoostLaw<T>, c: &StructureCoefficients<T>) -> DeformationNull<T> {
    let (q, qi, om) = (b.a, T::one() / b.a, c.lapse);
    let two = lit::<T>(2.0);
    let s = q * c.tr_chib() + qi * c.tr_chi() - two * q * c.omegab_hat - two * qi * c.omega_hat - b.e3_a - b.e4_ainv;
    let quarter = om * s / lit(4.0);
    let m = vscale(om, &vadd(&vscale(two, &c.zeta), &b.dlog_a));
    DeformationNull {
        nbar: two * om * b.e3_a,
        nn: two * om * b.e4_ainv,
        j: om * s / two,
        mbar: m,
        mm: vscale(-T::one(), &m),
        ii: madd(&mscale(om, &madd(&mscale(q, &c.chib_hat()), &mscale(qi, &c.chi_hat()))), &sym2(quarter, T::zero(), quarter)),
    }
}

/// Trace-free deformation tensor of the vector field, in the frame
/// `(a L̄̂, a⁻¹ L̂)` it is built on (`a = 1` for `M`).
pub fn deformation<T: Real>(vf: &Multiplier<T>, c: &StructureCoefficients<T>) -> Result<DeformationNull<T>> {
    check_positive(c.lapse, "Omega")?;
    match vf {
        Multiplier::M => Ok(deformation_ma(&BoostLaw::constant(T::one()), c)),
        Multiplier::Ma(p) => Ok(deformation_ma(&p.complete()?, c)),
        Multiplier::N(p) => Ok(deformation_n(&p.complete()?, c)),
    }
}

/// `π̂ = 𝓛_X g − ¼(tr 𝓛_X g) g` by central differences, decomposed in the
/// given frame (coordinate components of `e1, e2, e3, e4`).
pub fn lie_derivative_fd<T: Real>(
    metric: &dyn Fn(&[T; 4]) -> Result<Mat4<T>>,
    field: &dyn Fn(&[T; 4]) -> Result<[T; 4]>,
    frame: &[[T; 4]; 4],
    x: &[T; 4],
    rel: T,
) -> Result<DeformationNull<T>> {
    let pi = fd::lie_metric(metric, field, x, rel)?;
    let g = metric(x)?;
    let gi = tensor::inverse(&g).ok_or_else(|| Error::DegenerateMetric("metric not invertible".into()))?;
    let mut tr = T::zero();
    for m in 0..4 {
        for n in 0..4 {
            tr = tr + gi[m][n] * pi[m][n];
        }
    }
    let q = lit::<T>(0.25) * tr;
    let mut hat = pi;
    for m in 0..4 {
        for n in 0..4 {
            hat[m][n] = pi[m][n] - q * g[m][n];
        }
    }
    let mut p = [[T::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            p[a][b] = tensor::bilinear(&hat, &frame[a], &frame[b]);
        }
    }
    let out = DeformationNull::from_frame(&p);
    if !tensor::max_abs(&p).is_finite() {
        return Err(Error::Convergence("non-finite Lie derivative".into()));
    }
    Ok(out)
}

/// Bulk term split `K = K₊ + K₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDecomp<T> {
    pub kplus: T,
    pub kminus: T,
}

impl<T: Real> KDecomp<T> {
    pub fn total(&self) -> T {
        self.kplus + self.kminus
    }
}

fn bil<T: Real>(m: &Mat2<T>, x: &Vec2<T>, y: &Vec2<T>) -> T {
    vdot(&mv(m, x), y)
}

/// `K^{M_a}` split into its quadratic part `K₊` and the error part `K₋`.
/// Curvature and coefficients refer to the unboosted frame `(L̄̂, L̂)`;
/// `a = 1` gives the split for `M`.
pub fn k_decompose<T: Real>(w: &WeylNull<T>, c: &StructureCoefficients<T>, b: &BoostLaw<T>) -> Result<KDecomp<T>> {
    check_positive(b.a, "a")?;
    check_positive(c.lapse, "Omega")?;
    let (a, ai) = (b.a, T::one() / b.a);
    let (la, lai) = (b.e3_a, b.e4_ainv);
    let (wb, w4) = (c.omegab_hat, c.omega_hat);
    let (tb, t4) = (c.tr_chib(), c.tr_chi());
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let eight = lit::<T>(8.0);
    let a2 = a * a;
    let rs = w.rho * w.rho + w.sigma * w.sigma;
    let kp = (two * ai * w4 + lai) * a2 * a2 * norm2_sq(&w.abar)
        + two * (a * tb + ai * t4 + four * ai * w4 - la + lai) * a2 * vnorm_sq(&w.bbar)
        + (four * a * wb + four * a * tb - two * la + four * ai * w4 + four * ai * t4 - two * lai) * rs
        + two * (a * tb + ai * t4 + four * a * wb + la - lai) * vnorm_sq(&w.b) / a2
        + (two * a * wb + la) * norm2_sq(&w.a) / (a2 * a2);

    let dl = b.dlog_a;
    let neg = |v: &Vec2<T>| vscale(-T::one(), v);
    let eta2p = vadd(&vscale(two, &c.eta), &dl);
    let etab2m = vadd(&vscale(two, &c.etab), &neg(&dl));
    let chis = madd(&mscale(a, &c.chib_hat()), &mscale(ai, &c.chi_hat()));
    let rb = vadd(&vscale(w.rho, &w.bbar), &vscale(w.sigma, &vdual(&w.bbar)));
    let r4 = vadd(&vscale(w.rho, &w.b), &vscale(-w.sigma, &vdual(&w.b)));
    let ra_bar = madd(&mscale(w.rho, &w.abar), &mscale(w.sigma, &mdual(&w.abar)));
    let ra = madd(&mscale(w.rho, &w.a), &mscale(-w.sigma, &mdual(&w.a)));
    let km = four * a2 * a * bil(&w.abar, &etab2m, &w.bbar)
        + four * a * vdot(&rb, &eta2p)
        + two * a2 * dot2(&chis, &ra_bar)
        + eight * a * vdot(&rb, &etab2m)
        - eight * ai * vdot(&r4, &eta2p)
        - eight * bil(&chis, &w.bbar, &w.b)
        - four * ai * ai * ai * bil(&w.a, &eta2p, &w.b)
        - four * ai * vdot(&r4, &etab2m)
        + two * ai * ai * dot2(&chis, &ra);
    let pre = lit::<T>(3.0) / (eight * c.lapse * c.lapse * c.lapse);
    Ok(KDecomp { kplus: pre * kp, kminus: pre * km })
}

/// `K^{M_a} = (3/2) Q_abcd π̂^{ab} M^c M^d` assembled from the full
/// Bel-Robinson tensor of the boosted curvature components.
pub fn k_contraction<T: Real>(w: &WeylNull<T>, c: &StructureCoefficients<T>, b: &BoostLaw<T>) -> Result<T> {
    let pi = deformation(&Multiplier::Ma((*b).into()), c)?.raised();
    let q = bel_robinson(&reconstruct(&boost_weyl(b.a, w)));
    let mval = T::one() / (lit::<T>(2.0) * c.lapse);
    let m = [T::zero(), T::zero(), mval, mval];
    let mut s = T::zero();
    for a in 0..4 {
        for bb in 0..4 {
            if pi[a][bb] == T::zero() {
                continue;
            }
            for cc in 0..4 {
                for d in 0..4 {
                    s = s + q[a][bb][cc][d] * pi[a][bb] * m[cc] * m[d];
                }
            }
        }
    }
    Ok(lit::<T>(1.5) * s)
}

/// Outcome of the pointwise redshift comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Redshift<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
    /// Whether `C₀ Ω⁻¹ ≤ ε₀` and the expansions are positive.
    pub hypotheses: bool,
}

/// `φ K₊^q` against `(6/r)(1 − ε₀)² Q(n, M_q, M_q, M_q)`, with the
/// normal separation `φ = 2/(r √(trχ trχ̄))` evaluated locally.
pub fn redshift_pointwise<T: Real>(
    w: &WeylNull<T>,
    c: &StructureCoefficients<T>,
    q: &BoostLaw<T>,
    r: T,
    eps0: T,
    c0: T,
) -> Result<Redshift<T>> {
    let (t4, tb) = (c.tr_chi(), c.tr_chib());
    let hypotheses = t4 > T::zero() && tb > T::zero() && c0 / c.lapse <= eps0;
    let k = k_decompose(w, c, q)?;
    let flux = flux_sigma_density(w, q.a, c.lapse)?;
    let one = T::one();
    let rhs = lit::<T>(6.0) / r * (one - eps0) * (one - eps0) * flux.value;
    let prod = t4 * tb;
    let lhs = if prod > T::zero() { lit::<T>(2.0) / (r * prod.sqrt()) * k.kplus } else { T::neg_infinity() };
    Ok(Redshift { lhs, rhs, holds: lhs >= rhs, hypotheses })
}

/// Frame components `(e1, e2, e3, e4)` of the brackets of `N` with the
/// boosted frame. Only the `e3`, `e4` parts of `[N, e_A]` are frame
/// independent; they are stored as `n_ea[A] = (c3, c4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorFrame<T> {
    pub n_e3: [T; 4],
    pub n_e4: [T; 4],
    pub n_ea: [[T; 2]; 2],
}

pub fn commutator_frame<T: Real>(c: &StructureCoefficients<T>, q: &PartialBoost<T>) -> Result<CommutatorFrame<T>> {
    let b = q.complete()?;
    let def = deformation_n(&b, c);
    let (qq, qi, om) = (b.a, T::one() / b.a, c.lapse);
    let h = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let dm = vscale(h, &vadd(&def.mbar, &vscale(-T::one(), &def.mm)));
    let dq = vscale(om, &b.dlog_a);
    let s3 = vadd(&vscale(-T::one(), &dm), &dq);
    let s4 = vadd(&dm, &vscale(-T::one(), &dq));
    Ok(CommutatorFrame {
        n_e3: [s3[0], s3[1], -h * om * (qi * c.omega_hat + qq * c.omegab_hat + b.e4_ainv), quarter * def.nbar],
        n_e4: [s4[0], s4[1], quarter * def.nn, -h * om * (qq * c.omegab_hat + b.e3_a + qi * c.omega_hat)],
        n_ea: [[-h * om * b.dlog_a[0], h * om * b.dlog_a[0]], [-h * om * b.dlog_a[1], h * om * b.dlog_a[1]]],
    })
}

/// Frame components of a coordinate vector: `c_A = g(V, e_A)`,
/// `c_3 = −½ g(V, e4)`, `c_4 = −½ g(V, e3)`.
pub fn frame_components<T: Real>(g: &Mat4<T>, frame: &[[T; 4]; 4], v: &[T; 4]) -> [T; 4] {
    let h = lit::<T>(-0.5);
    [
        tensor::bilinear(g, v, &frame[0]),
        tensor::bilinear(g, v, &frame[1]),
        h * tensor::bilinear(g, v, &frame[3]),
        h * tensor::bilinear(g, v, &frame[2]),
    ]
}

/// One row of the energy-identity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow<T> {
    pub r: T,
    pub flux: T,
    pub int_kplus: T,
    pub int_kminus: T,
    pub residual: T,
}

pub const ENERGY_CSV_HEADER: [&str; 5] = ["r", "flux", "int_Kplus", "int_Kminus", "closure_residual"];

/// Energy identity for the current of `M` on the cosmological region of
/// Schwarzschild-de Sitter with the exact curvature `ρ = −2m/r³`.
///
/// Quantities are per unit length of the static Killing time `t`: the
/// flux is `√F 4πr² Q(n, M, M, M)` and the bulk integrand `√F 4πr² φ K`.
/// Residuals are relative to the flux at `r0`.
pub fn energy_closure<T: Real>(geo: &SdsGeometry<T>, r0: T, r1: T, n: usize) -> Result<Vec<EnergyRow<T>>> {
    if !(r1 > r0) || r0 <= geo.r_c {
        return Err(Error::Domain("need r_C < r0 < r1".into()));
    }
    let n = n.max(2) + n % 2;
    let four_pi = lit::<T>(4.0) * T::PI();
    let at = |r: T| -> Result<(T, KDecomp<T>)> {
        let rs = geo.rstar(r)?;
        let sd = geo.spherical(SdsGauge::EF, T::zero(), rs)?;
        let c = StructureCoefficients::spherical(&sd);
        let w = WeylNull::only_rho(geo.params.rho(r));
        let f = geo.f(r);
        let vol = f.sqrt() * four_pi * r * r;
        let flux = flux_sigma_density(&w, T::one(), c.lapse)?.value * vol;
        let k = k_decompose(&w, &c, &BoostLaw::constant(T::one()))?;
        let phi = lit::<T>(2.0) / (r * (c.tr_chi() * c.tr_chib()).sqrt());
        Ok((flux, KDecomp { kplus: k.kplus * phi * vol, kminus: k.kminus * phi * vol }))
    };
    let hstep = (r1 - r0) / crate::scalar::from_usize(n);
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let r = r0 + hstep * crate::scalar::from_usize(i);
        samples.push((r, at(r)?));
    }
    let e0 = samples[0].1 .0;
    let mut rows = vec![EnergyRow { r: r0, flux: e0, int_kplus: T::zero(), int_kminus: T::zero(), residual: T::zero() }];
    let (mut ip, mut im) = (T::zero(), T::zero());
    let six = lit::<T>(6.0);
    for i in (0..n).step_by(2) {
        let (_, (_, k0)) = samples[i];
        let (_, (_, k1)) = samples[i + 1];
        let (r2, (f2, k2)) = samples[i + 2];
        let w = hstep * lit::<T>(2.0) / six;
        ip = ip + w * (k0.kplus + lit::<T>(4.0) * k1.kplus + k2.kplus);
        im = im + w * (k0.kminus + lit::<T>(4.0) * k1.kminus + k2.kminus);
        rows.push(EnergyRow { r: r2, flux: f2, int_kplus: ip, int_kminus: im, residual: (f2 - e0 + ip + im) / e0 });
    }
    Ok(rows)
}
