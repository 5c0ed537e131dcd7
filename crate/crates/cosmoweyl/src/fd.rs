//! Central finite differences on coordinate charts: metric derivatives,
//! Christoffel symbols, Riemann curvature, Lie derivatives and brackets.
//!
//! Steps are relative: `h_i = rel * max(1, |x_i|)`. First derivatives use
//! [`REL_STEP`]; the second differences entering curvature use the larger
//! [`REL_STEP2`] so that cancellation error stays below truncation error.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub const REL_STEP: f64 = 1e-5;
pub const REL_STEP2: f64 = 1e-4;

pub type Arr<T, const N: usize> = [T; N];
pub type M<T, const N: usize> = [[T; N]; N];
pub type R3<T, const N: usize> = [[[T; N]; N]; N];
pub type R4<T, const N: usize> = [[[[T; N]; N]; N]; N];

#[inline]
pub fn step<T: Real>(x: T, rel: T) -> T {
    rel * x.abs().max(T::one())
}

fn shifted<T: Real, const N: usize>(x: &[T; N], i: usize, d: T) -> [T; N] {
    let mut y = *x;
    y[i] = y[i] + d;
    y
}

fn zeros3<T: Real, const N: usize>() -> R3<T, N> {
    [[[T::zero(); N]; N]; N]
}

fn zeros4<T: Real, const N: usize>() -> R4<T, N> {
    [[[[T::zero(); N]; N]; N]; N]
}

/// Central derivative of a scalar function of one variable.
pub fn derivative<T: Real>(f: impl Fn(T) -> Result<T>, x: T, rel: T) -> Result<T> {
    let h = step(x, rel);
    Ok((f(x + h)? - f(x - h)?) / (h + h))
}

/// Gradient of a scalar field, `∂_i f`.
pub fn gradient<T: Real, const N: usize>(
    f: &dyn Fn(&[T; N]) -> Result<T>,
    x: &[T; N],
    rel: T,
) -> Result<[T; N]> {
    let mut g = [T::zero(); N];
    for i in 0..N {
        let h = step(x[i], rel);
        g[i] = (f(&shifted(x, i, h))? - f(&shifted(x, i, -h))?) / (h + h);
    }
    Ok(g)
}

/// Gradient with the step-halving convergence assertion.
pub fn gradient_checked<T: Real, const N: usize>(
    f: &dyn Fn(&[T; N]) -> Result<T>,
    x: &[T; N],
) -> Result<[T; N]> {
    let rel = lit::<T>(REL_STEP);
    let a = gradient(f, x, rel)?;
    let b = gradient(f, x, rel * lit(0.5))?;
    let scale = a.iter().fold(T::one(), |m, v| m.max(v.abs()));
    for i in 0..N {
        let tol = lit::<T>(1e-6).max(T::epsilon().sqrt()) * scale;
        if (a[i] - b[i]).abs() > tol {
            return Err(Error::Convergence(format!(
                "derivative {i} not stable under step halving: {:e} vs {:e}",
                a[i], b[i]
            )));
        }
    }
    Ok(b)
}

/// `dv[k][i] = ∂_k V^i` for a vector-valued map.
pub fn jacobian<T: Real, const N: usize, const K: usize>(
    f: &dyn Fn(&[T; N]) -> Result<[T; K]>,
    x: &[T; N],
    rel: T,
) -> Result<[[T; K]; N]> {
    let mut out = [[T::zero(); K]; N];
    for k in 0..N {
        let h = step(x[k], rel);
        let p = f(&shifted(x, k, h))?;
        let m = f(&shifted(x, k, -h))?;
        for i in 0..K {
            out[k][i] = (p[i] - m[i]) / (h + h);
        }
    }
    Ok(out)
}

/// `dg[k][i][j] = ∂_k g_ij`.
pub fn tensor2_derivs<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    x: &[T; N],
    rel: T,
) -> Result<R3<T, N>> {
    let mut dg = zeros3::<T, N>();
    for k in 0..N {
        let h = step(x[k], rel);
        let p = g(&shifted(x, k, h))?;
        let m = g(&shifted(x, k, -h))?;
        for i in 0..N {
            for j in 0..N {
                dg[k][i][j] = (p[i][j] - m[i][j]) / (h + h);
            }
        }
    }
    Ok(dg)
}

/// `d2g[k][l][i][j] = ∂_k ∂_l g_ij`.
pub fn tensor2_second_derivs<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    x: &[T; N],
    rel: T,
) -> Result<R4<T, N>> {
    let mut d2 = zeros4::<T, N>();
    let g0 = g(x)?;
    let hs: [T; N] = core::array::from_fn(|i| step(x[i], rel));
    for k in 0..N {
        let hk = hs[k];
        let p = g(&shifted(x, k, hk))?;
        let m = g(&shifted(x, k, -hk))?;
        for i in 0..N {
            for j in 0..N {
                d2[k][k][i][j] = (p[i][j] - g0[i][j] - g0[i][j] + m[i][j]) / (hk * hk);
            }
        }
        for l in k + 1..N {
            let hl = hs[l];
            let pp = g(&shifted(&shifted(x, k, hk), l, hl))?;
            let pm = g(&shifted(&shifted(x, k, hk), l, -hl))?;
            let mp = g(&shifted(&shifted(x, k, -hk), l, hl))?;
            let mm = g(&shifted(&shifted(x, k, -hk), l, -hl))?;
            for i in 0..N {
                for j in 0..N {
                    let v = (pp[i][j] - pm[i][j] - mp[i][j] + mm[i][j]) / (lit::<T>(4.0) * hk * hl);
                    d2[k][l][i][j] = v;
                    d2[l][k][i][j] = v;
                }
            }
        }
    }
    Ok(d2)
}

/// `Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db − ∂_d g_bc)`.
pub fn christoffel<T: Real, const N: usize>(ginv: &M<T, N>, dg: &R3<T, N>) -> R3<T, N> {
    let mut gam = zeros3::<T, N>();
    let h = lit::<T>(0.5);
    for a in 0..N {
        for b in 0..N {
            for c in b..N {
                let mut s = T::zero();
                for d in 0..N {
                    s = s + ginv[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                }
                gam[a][b][c] = h * s;
                gam[a][c][b] = h * s;
            }
        }
    }
    gam
}

/// Christoffel symbols of a metric field at `x` by central differences.
pub fn christoffel_fd<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    x: &[T; N],
    rel: T,
) -> Result<(M<T, N>, M<T, N>, R3<T, N>)> {
    let g0 = g(x)?;
    let ginv = crate::tensor::inverse(&g0)
        .ok_or_else(|| Error::DegenerateMetric("singular metric in Christoffel evaluation".into()))?;
    let dg = tensor2_derivs(g, x, rel)?;
    Ok((g0, ginv, christoffel(&ginv, &dg)))
}

/// Fully lowered Riemann tensor `R_abcd`, sign fixed so that the unit round
/// sphere has `R_1212 = g_11 g_22`.
pub fn riemann_fd<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    x: &[T; N],
    rel1: T,
    rel2: T,
) -> Result<(M<T, N>, R4<T, N>)> {
    let g0 = g(x)?;
    let ginv = crate::tensor::inverse(&g0)
        .ok_or_else(|| Error::DegenerateMetric("singular metric in Riemann evaluation".into()))?;
    let dg = tensor2_derivs(g, x, rel1)?;
    let d2 = tensor2_second_derivs(g, x, rel2)?;
    let gam = christoffel(&ginv, &dg);
    // lowered Γ_ebc = g_ea Γ^a_bc
    let mut gl = zeros3::<T, N>();
    for e in 0..N {
        for b in 0..N {
            for c in 0..N {
                let mut s = T::zero();
                for a in 0..N {
                    s = s + g0[e][a] * gam[a][b][c];
                }
                gl[e][b][c] = s;
            }
        }
    }
    let h = lit::<T>(0.5);
    let mut r = zeros4::<T, N>();
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    let mut v = h * (d2[b][c][a][d] + d2[a][d][b][c] - d2[b][d][a][c] - d2[a][c][b][d]);
                    for e in 0..N {
                        v = v + gl[e][b][c] * gam[e][a][d] - gl[e][b][d] * gam[e][a][c];
                    }
                    r[a][b][c][d] = v;
                }
            }
        }
    }
    Ok((g0, r))
}

/// [`riemann_fd`] with one Richardson step in the second-difference step
/// (`rel2` and `rel2 / 2`), cancelling its leading `O(h²)` error. Useful when
/// metric components are large compared with the curvature sought.
pub fn riemann_fd_extrapolated<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    x: &[T; N],
    rel1: T,
    rel2: T,
) -> Result<(M<T, N>, R4<T, N>)> {
    let (g0, coarse) = riemann_fd(g, x, rel1, rel2)?;
    let (_, mut fine) = riemann_fd(g, x, rel1, rel2 * lit::<T>(0.5))?;
    let third = lit::<T>(1.0 / 3.0);
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    let f = fine[a][b][c][d];
                    fine[a][b][c][d] = f + (f - coarse[a][b][c][d]) * third;
                }
            }
        }
    }
    Ok((g0, fine))
}

/// `(𝓛_X g)_μν` by central differences of the metric and of `X`.
pub fn lie_metric<T: Real, const N: usize>(
    g: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    xf: &dyn Fn(&[T; N]) -> Result<[T; N]>,
    x: &[T; N],
    rel: T,
) -> Result<M<T, N>> {
    lie_tensor2(g, xf, x, rel)
}

/// Lie derivative of a covariant 2-tensor field along a vector field.
pub fn lie_tensor2<T: Real, const N: usize>(
    e: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    xf: &dyn Fn(&[T; N]) -> Result<[T; N]>,
    x: &[T; N],
    rel: T,
) -> Result<M<T, N>> {
    let e0 = e(x)?;
    let de = tensor2_derivs(e, x, rel)?;
    let xv = xf(x)?;
    let dx = jacobian(xf, x, rel)?;
    let mut out = [[T::zero(); N]; N];
    for m in 0..N {
        for n in 0..N {
            let mut s = T::zero();
            for l in 0..N {
                s = s + xv[l] * de[l][m][n] + e0[l][n] * dx[m][l] + e0[m][l] * dx[n][l];
            }
            out[m][n] = s;
        }
    }
    Ok(out)
}

/// Coordinate components of the bracket `[X, Y]`.
pub fn bracket<T: Real, const N: usize>(
    xf: &dyn Fn(&[T; N]) -> Result<[T; N]>,
    yf: &dyn Fn(&[T; N]) -> Result<[T; N]>,
    x: &[T; N],
    rel: T,
) -> Result<[T; N]> {
    let xv = xf(x)?;
    let yv = yf(x)?;
    let dx = jacobian(xf, x, rel)?;
    let dy = jacobian(yf, x, rel)?;
    let mut out = [T::zero(); N];
    for m in 0..N {
        let mut s = T::zero();
        for n in 0..N {
            s = s + xv[n] * dy[n][m] - yv[n] * dx[n][m];
        }
        out[m] = s;
    }
    Ok(out)
}

/// `∇_λ E_μν` (index order `[λ][μ][ν]`) for a covariant 2-tensor field.
pub fn covariant_tensor2<T: Real, const N: usize>(
    e: &dyn Fn(&[T; N]) -> Result<M<T, N>>,
    gam: &R3<T, N>,
    x: &[T; N],
    rel: T,
) -> Result<R3<T, N>> {
    let e0 = e(x)?;
    let de = tensor2_derivs(e, x, rel)?;
    let mut out = zeros3::<T, N>();
    for l in 0..N {
        for m in 0..N {
            for n in 0..N {
                let mut s = de[l][m][n];
                for k in 0..N {
                    s = s - gam[k][l][m] * e0[k][n] - gam[k][l][n] * e0[m][k];
                }
                out[l][m][n] = s;
            }
        }
    }
    Ok(out)
}

/// `∇_λ V^μ` (index order `[λ][μ]`) for a vector field.
pub fn covariant_vector<T: Real, const N: usize>(
    v: &dyn Fn(&[T; N]) -> Result<[T; N]>,
    gam: &R3<T, N>,
    x: &[T; N],
    rel: T,
) -> Result<M<T, N>> {
    let v0 = v(x)?;
    let dv = jacobian(v, x, rel)?;
    let mut out = [[T::zero(); N]; N];
    for l in 0..N {
        for m in 0..N {
            let mut s = dv[l][m];
            for k in 0..N {
                s = s + gam[m][l][k] * v0[k];
            }
            out[l][m] = s;
        }
    }
    Ok(out)
}
