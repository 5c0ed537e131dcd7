//! Weyl curvature: construction from the Riemann tensor, null
//! decomposition relative to a frame `(e1, e2, e3, e4)` with
//! `g(e3, e4) = −2`, duals, boosts and the electric/magnetic split.
//!
//! Frame indices are `0 ↔ e1, 1 ↔ e2, 2 ↔ e3, 3 ↔ e4`. The spacetime volume
//! form satisfies `ε(e1, e2, e3, e4) = 2`, and on the spheres `ε_12 = 1`.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::tensor::{self, mdual, sym2, vdual, zero_rank4, Mat2, Mat4, Rank4, Vec2};

const E3: usize = 2;
const E4: usize = 3;

/// Null components of a Weyl field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeylNull<T> {
    pub abar: Mat2<T>,
    pub bbar: Vec2<T>,
    pub rho: T,
    pub sigma: T,
    pub b: Vec2<T>,
    pub a: Mat2<T>,
}

pub const WEYL_CSV_HEADER: [&str; 10] = ["abar11", "abar12", "bbar1", "bbar2", "rho", "sigma", "beta1", "beta2", "alpha11", "alpha12"];

impl<T: Real> WeylNull<T> {
    pub fn zero() -> Self {
        let z = [[T::zero(); 2]; 2];
        Self { abar: z, bbar: [T::zero(); 2], rho: T::zero(), sigma: T::zero(), b: [T::zero(); 2], a: z }
    }

    /// Builds a field from its ten independent numbers, in CSV order.
    pub fn from_row(v: &[T; 10]) -> Self {
        Self {
            abar: sym2(v[0], v[1], -v[0]),
            bbar: [v[2], v[3]],
            rho: v[4],
            sigma: v[5],
            b: [v[6], v[7]],
            a: sym2(v[8], v[9], -v[8]),
        }
    }

    pub fn to_row(&self) -> [T; 10] {
        [
            self.abar[0][0],
            self.abar[0][1],
            self.bbar[0],
            self.bbar[1],
            self.rho,
            self.sigma,
            self.b[0],
            self.b[1],
            self.a[0][0],
            self.a[0][1],
        ]
    }

    pub fn only_rho(rho: T) -> Self {
        Self { rho, ..Self::zero() }
    }

    /// Largest deviation of `ᾱ`, `α` from being symmetric and trace-free.
    pub fn invariant_residual(&self) -> T {
        let mut m = tensor::trace2(&self.abar).abs().max(tensor::trace2(&self.a).abs());
        m = m.max((self.abar[0][1] - self.abar[1][0]).abs());
        m.max((self.a[0][1] - self.a[1][0]).abs())
    }
}

/// Weyl tensor with all indices down in a null frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weyl4<T> {
    pub w: Rank4<T>,
}

/// Residuals of the algebraic identities of a Weyl-type tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals<T> {
    pub antisymmetry: T,
    pub pair_symmetry: T,
    pub cyclic: T,
    pub trace: T,
}

impl<T: Real> SymmetryResiduals<T> {
    pub fn max(&self) -> T {
        self.antisymmetry.max(self.pair_symmetry).max(self.cyclic).max(self.trace)
    }
}

/// Algebraic identity residuals of a rank-4 tensor w.r.t. a metric inverse.
pub fn symmetry_residuals<T: Real>(w: &Rank4<T>, ginv: &Mat4<T>) -> SymmetryResiduals<T> {
    let mut r = SymmetryResiduals { antisymmetry: T::zero(), pair_symmetry: T::zero(), cyclic: T::zero(), trace: T::zero() };
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = w[a][b][c][d];
                    r.antisymmetry = r.antisymmetry.max((v + w[b][a][c][d]).abs()).max((v + w[a][b][d][c]).abs());
                    r.pair_symmetry = r.pair_symmetry.max((v - w[c][d][a][b]).abs());
                    r.cyclic = r.cyclic.max((v + w[a][c][d][b] + w[a][d][b][c]).abs());
                }
            }
        }
    }
    for b in 0..4 {
        for d in 0..4 {
            let mut s = T::zero();
            for a in 0..4 {
                for c in 0..4 {
                    s = s + ginv[a][c] * w[a][b][c][d];
                }
            }
            r.trace = r.trace.max(s.abs());
        }
    }
    r
}

/// `W = R − (Λ/3)(g∧g)`, lowered coordinate components.
pub fn weyl_from_riemann<T: Real>(riemann: &Rank4<T>, g: &Mat4<T>, ginv: &Mat4<T>, lambda: T) -> Result<Rank4<T>> {
    let res = symmetry_residuals(riemann, ginv);
    let scale = T::one().max(tensor::max_abs_rank4(riemann));
    let worst = res.antisymmetry.max(res.pair_symmetry).max(res.cyclic);
    if worst > lit::<T>(1e-6) * scale {
        return Err(Error::Symmetry(crate::scalar::to_f64(worst)));
    }
    let l3 = lambda / lit(3.0);
    let mut w = zero_rank4::<T>();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    w[a][b][c][d] = riemann[a][b][c][d] - l3 * (g[a][c] * g[b][d] - g[a][d] * g[b][c]);
                }
            }
        }
    }
    Ok(w)
}

/// Frame components `W(e_a, e_b, e_c, e_d)` of a coordinate tensor.
pub fn to_frame<T: Real>(w: &Rank4<T>, e: &[[T; 4]; 4]) -> Rank4<T> {
    // contract one slot at a time
    let mut t1 = zero_rank4::<T>();
    for a in 0..4 {
        for n in 0..4 {
            for r in 0..4 {
                for s in 0..4 {
                    let mut v = T::zero();
                    for m in 0..4 {
                        v = v + e[a][m] * w[m][n][r][s];
                    }
                    t1[a][n][r][s] = v;
                }
            }
        }
    }
    let mut t2 = zero_rank4::<T>();
    for a in 0..4 {
        for b in 0..4 {
            for r in 0..4 {
                for s in 0..4 {
                    let mut v = T::zero();
                    for n in 0..4 {
                        v = v + e[b][n] * t1[a][n][r][s];
                    }
                    t2[a][b][r][s] = v;
                }
            }
        }
    }
    let mut t3 = zero_rank4::<T>();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for s in 0..4 {
                    let mut v = T::zero();
                    for r in 0..4 {
                        v = v + e[c][r] * t2[a][b][r][s];
                    }
                    t3[a][b][c][s] = v;
                }
            }
        }
    }
    let mut out = zero_rank4::<T>();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = T::zero();
                    for s in 0..4 {
                        v = v + e[d][s] * t3[a][b][c][s];
                    }
                    out[a][b][c][d] = v;
                }
            }
        }
    }
    out
}

/// Checks `g(e_a, e_b) = η_ab` for the null frame metric.
pub fn check_null_frame<T: Real>(g: &Mat4<T>, e: &[[T; 4]; 4], tol: T) -> Result<()> {
    let eta = tensor::null_frame_metric::<T>();
    for a in 0..4 {
        for b in 0..4 {
            let v = tensor::bilinear(g, &e[a], &e[b]);
            if (v - eta[a][b]).abs() > tol {
                return Err(Error::Frame(format!("g(e{}, e{}) = {v:e}", a + 1, b + 1)));
            }
        }
    }
    Ok(())
}

/// Totally antisymmetric `ε_abcd` in the null frame.
pub fn volume_form<T: Real>() -> Rank4<T> {
    let mut eps = zero_rank4::<T>();
    let two = lit::<T>(2.0);
    let perms = permutations4();
    for (p, sign) in perms {
        eps[p[0]][p[1]][p[2]][p[3]] = if sign { two } else { -two };
    }
    eps
}

fn permutations4() -> Vec<([usize; 4], bool)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut distinct = true;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] == p[j] {
                                distinct = false;
                            }
                        }
                    }
                    if distinct {
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out.push((p, inv % 2 == 0));
                    }
                }
            }
        }
    }
    out
}

impl<T: Real> Weyl4<T> {
    pub fn zero() -> Self {
        Self { w: zero_rank4() }
    }

    pub fn residuals(&self) -> SymmetryResiduals<T> {
        symmetry_residuals(&self.w, &tensor::null_frame_inverse())
    }

    /// Right dual `(*W)_abcd = ½ W_ab^ef ε_efcd`.
    pub fn dual(&self) -> Self {
        let eps = volume_form::<T>();
        let gi = tensor::null_frame_inverse::<T>();
        let h = lit::<T>(0.5);
        let mut out = zero_rank4::<T>();
        for a in 0..4 {
            for b in 0..4 {
                // raise last pair
                let mut up = [[T::zero(); 4]; 4];
                for e in 0..4 {
                    for f in 0..4 {
                        let mut v = T::zero();
                        for g in 0..4 {
                            for hh in 0..4 {
                                v = v + gi[e][g] * gi[f][hh] * self.w[a][b][g][hh];
                            }
                        }
                        up[e][f] = v;
                    }
                }
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = T::zero();
                        for e in 0..4 {
                            for f in 0..4 {
                                v = v + up[e][f] * eps[e][f][c][d];
                            }
                        }
                        out[a][b][c][d] = h * v;
                    }
                }
            }
        }
        Self { w: out }
    }

    fn set(&mut self, i: [usize; 4], v: T) {
        let [a, b, c, d] = i;
        for (p, s) in [([a, b, c, d], 1.0), ([b, a, c, d], -1.0), ([a, b, d, c], -1.0), ([b, a, d, c], 1.0)] {
            self.w[p[0]][p[1]][p[2]][p[3]] = lit::<T>(s) * v;
            self.w[p[2]][p[3]][p[0]][p[1]] = lit::<T>(s) * v;
        }
    }
}

fn eps2<T: Real>(a: usize, b: usize) -> T {
    match (a, b) {
        (0, 1) => T::one(),
        (1, 0) => -T::one(),
        _ => T::zero(),
    }
}

fn delta<T: Real>(a: usize, b: usize) -> T {
    if a == b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn null_decompose<T: Real>(w: &Weyl4<T>) -> WeylNull<T> {
    let h = lit::<T>(0.5);
    let q = lit::<T>(0.25);
    let w = &w.w;
    let mut out = WeylNull::zero();
    for a in 0..2 {
        for b in 0..2 {
            out.abar[a][b] = w[a][E3][b][E3];
            out.a[a][b] = w[a][E4][b][E4];
        }
        out.bbar[a] = h * w[a][E3][E3][E4];
        out.b[a] = h * w[a][E4][E3][E4];
    }
    out.rho = q * w[E3][E4][E3][E4];
    out.sigma = q * (w[0][1][E3][E4] - w[1][0][E3][E4]);
    out
}

/// Frame components with the given null parts.
pub fn reconstruct<T: Real>(n: &WeylNull<T>) -> Weyl4<T> {
    let two = lit::<T>(2.0);
    let mut w = Weyl4::zero();
    w.set([E3, E4, E3, E4], lit::<T>(4.0) * n.rho);
    for a in 0..2 {
        w.set([a, E3, E3, E4], two * n.bbar[a]);
        w.set([a, E4, E3, E4], two * n.b[a]);
        for b in 0..2 {
            w.set([a, E3, b, E3], n.abar[a][b]);
            w.set([a, E4, b, E4], n.a[a][b]);
            w.set([a, b, E3, E4], two * n.sigma * eps2::<T>(a, b));
            w.set([a, E3, b, E4], -n.rho * delta::<T>(a, b) + n.sigma * eps2::<T>(a, b));
            for c in 0..2 {
                w.set([a, E3, b, c], delta::<T>(a, b) * n.bbar[c] - delta::<T>(a, c) * n.bbar[b]);
                w.set([a, E4, b, c], -delta::<T>(a, b) * n.b[c] + delta::<T>(a, c) * n.b[b]);
                for d in 0..2 {
                    w.set([a, b, c, d], -n.rho * eps2::<T>(a, b) * eps2::<T>(c, d));
                }
            }
        }
    }
    w
}

/// `σ` as `ρ[*W]`; agrees with the component of [`null_decompose`].
pub fn sigma_via_dual<T: Real>(w: &Weyl4<T>) -> T {
    lit::<T>(0.25) * w.dual().w[E3][E4][E3][E4]
}

/// Components relative to `(a e3, a⁻¹ e4)`.
pub fn boost_weyl<T: Real>(a: T, w: &WeylNull<T>) -> WeylNull<T> {
    let ai = T::one() / a;
    WeylNull {
        abar: tensor::mscale(a * a, &w.abar),
        bbar: tensor::vscale(a, &w.bbar),
        rho: w.rho,
        sigma: w.sigma,
        b: tensor::vscale(ai, &w.b),
        a: tensor::mscale(ai * ai, &w.a),
    }
}

/// Electric and magnetic parts relative to the normal `n = ½(e3 + e4)`
/// of the boosted frame, components in `(X, e1, e2)` with `X = ½(e3 − e4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMPair<T> {
    pub e: [[T; 3]; 3],
    pub h: [[T; 3]; 3],
}

pub const EM_CSV_HEADER: [&str; 12] =
    ["E_XX", "E_X1", "E_X2", "E_11", "E_12", "H_XX", "H_X1", "H_X2", "H_11", "H_12", "trE", "trH"];

impl<T: Real> EMPair<T> {
    pub fn to_row(&self) -> [T; 12] {
        let (e, h) = (&self.e, &self.h);
        [
            e[0][0],
            e[0][1],
            e[0][2],
            e[1][1],
            e[1][2],
            h[0][0],
            h[0][1],
            h[0][2],
            h[1][1],
            h[1][2],
            e[0][0] + e[1][1] + e[2][2],
            h[0][0] + h[1][1] + h[2][2],
        ]
    }

    pub fn invariant_residual(&self) -> T {
        let mut m = (self.e[0][0] + self.e[1][1] + self.e[2][2]).abs();
        m = m.max((self.h[0][0] + self.h[1][1] + self.h[2][2]).abs());
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.e[i][j] - self.e[j][i]).abs()).max((self.h[i][j] - self.h[j][i]).abs());
            }
        }
        m
    }
}

fn em_from_parts<T: Real>(rho: T, bbar: &Vec2<T>, b: &Vec2<T>, abar: &Mat2<T>, a: &Mat2<T>, sign: T) -> [[T; 3]; 3] {
    let h = lit::<T>(0.5);
    let q = lit::<T>(0.25);
    let mut m = [[T::zero(); 3]; 3];
    m[0][0] = rho;
    for i in 0..2 {
        let v = h * (bbar[i] + sign * b[i]);
        m[0][i + 1] = v;
        m[i + 1][0] = v;
        for j in 0..2 {
            m[i + 1][j + 1] = q * (a[i][j] * sign + abar[i][j]) - h * rho * delta::<T>(i, j);
        }
    }
    m
}

/// `E_XX = ρ`, `E_AX = ½(β̄ + β)`, `E_AB = ¼(α + ᾱ) − ½ρ g̸`, and the dual
/// expressions for `H`, after boosting by `q`.
pub fn em_decompose<T: Real>(w: &WeylNull<T>, q: T) -> EMPair<T> {
    let w = boost_weyl(q, w);
    let e = em_from_parts(w.rho, &w.bbar, &w.b, &w.abar, &w.a, T::one());
    let h = em_from_parts(w.sigma, &vdual(&w.bbar), &vdual(&w.b), &mdual(&w.abar), &mdual(&w.a), -T::one());
    EMPair { e, h }
}

/// `E = W(n,·,n,·)`, `H = *W(n,·,n,·)` by direct contraction of frame
/// components, with `n = ½(e3 + e4)` and `X = ½(e3 − e4)`.
pub fn em_contraction<T: Real>(w: &Weyl4<T>) -> EMPair<T> {
    let h = lit::<T>(0.5);
    let z = T::zero();
    let n = [z, z, h, h];
    let basis = [[z, z, h, -h], [T::one(), z, z, z], [z, T::one(), z, z]];
    let contract = |t: &Rank4<T>| {
        let mut m = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for a in 0..4 {
                    for b in 0..4 {
                        for c in 0..4 {
                            for d in 0..4 {
                                s = s + t[a][b][c][d] * n[a] * basis[i][b] * n[c] * basis[j][d];
                            }
                        }
                    }
                }
                m[i][j] = s;
            }
        }
        m
    };
    EMPair { e: contract(&w.w), h: contract(&w.dual().w) }
}
