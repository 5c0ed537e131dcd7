//! Fixed-size tensor helpers: 4×4 metrics, rank-4 arrays and tensors on
//! the 2-spheres, all expressed in orthonormal sphere frames where needed.

use crate::scalar::{lit, Real};

pub type Vec2<T> = [T; 2];
pub type Mat2<T> = [[T; 2]; 2];
pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];
pub type Rank4<T> = [[[[T; 4]; 4]; 4]; 4];

pub fn zero_mat<T: Real, const N: usize>() -> [[T; N]; N] {
    [[T::zero(); N]; N]
}

pub fn identity<T: Real, const N: usize>() -> [[T; N]; N] {
    let mut m = zero_mat::<T, N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn zero_rank4<T: Real>() -> Rank4<T> {
    [[[[T::zero(); 4]; 4]; 4]; 4]
}

pub fn matmul<T: Real, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    let mut c = zero_mat::<T, N>();
    for i in 0..N {
        for j in 0..N {
            let mut s = T::zero();
            for k in 0..N {
                s = s + a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn transpose<T: Real, const N: usize>(a: &[[T; N]; N]) -> [[T; N]; N] {
    let mut c = zero_mat::<T, N>();
    for i in 0..N {
        for j in 0..N {
            c[i][j] = a[j][i];
        }
    }
    c
}

/// Gauss–Jordan inverse with partial pivoting; `None` for singular input.
pub fn inverse<T: Real, const N: usize>(m: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let mut a = *m;
    let mut inv = identity::<T, N>();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..N {
        let mut piv = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() <= T::epsilon() * scale * lit(16.0) {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for k in 0..N {
            a[col][k] = a[col][k] / p;
            inv[col][k] = inv[col][k] / p;
        }
        for row in 0..N {
            if row != col {
                let f = a[row][col];
                if f != T::zero() {
                    for k in 0..N {
                        a[row][k] = a[row][k] - f * a[col][k];
                        inv[row][k] = inv[row][k] - f * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Determinant by LU elimination.
pub fn det<T: Real, const N: usize>(m: &[[T; N]; N]) -> T {
    let mut a = *m;
    let mut d = T::one();
    for col in 0..N {
        let mut piv = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        d = d * a[col][col];
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
        }
    }
    d
}

/// `g(a, b)` for a bilinear form given by components.
pub fn bilinear<T: Real, const N: usize>(g: &[[T; N]; N], a: &[T; N], b: &[T; N]) -> T {
    let mut s = T::zero();
    for i in 0..N {
        for j in 0..N {
            s = s + g[i][j] * a[i] * b[j];
        }
    }
    s
}

pub fn mat_vec<T: Real, const N: usize>(m: &[[T; N]; N], v: &[T; N]) -> [T; N] {
    let mut out = [T::zero(); N];
    for i in 0..N {
        for j in 0..N {
            out[i] = out[i] + m[i][j] * v[j];
        }
    }
    out
}

pub fn max_abs<T: Real, const N: usize>(m: &[[T; N]; N]) -> T {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn max_abs_rank4<T: Real>(w: &Rank4<T>) -> T {
    let mut m = T::zero();
    for a in w {
        for b in a {
            for c in b {
                for d in c {
                    m = m.max(d.abs());
                }
            }
        }
    }
    m
}

/// Frame metric of a null frame `(e1, e2, e3, e4)` with `g(e3, e4) = -2`.
pub fn null_frame_metric<T: Real>() -> Mat4<T> {
    let mut g = zero_mat::<T, 4>();
    g[0][0] = T::one();
    g[1][1] = T::one();
    g[2][3] = lit(-2.0);
    g[3][2] = lit(-2.0);
    g
}

/// Inverse of [`null_frame_metric`].
pub fn null_frame_inverse<T: Real>() -> Mat4<T> {
    let mut g = zero_mat::<T, 4>();
    g[0][0] = T::one();
    g[1][1] = T::one();
    g[2][3] = lit(-0.5);
    g[3][2] = lit(-0.5);
    g
}

// ---- tensors on the spheres, orthonormal frame components ----

pub fn sym2<T: Real>(xx: T, xy: T, yy: T) -> Mat2<T> {
    [[xx, xy], [xy, yy]]
}

pub fn trace2<T: Real>(a: &Mat2<T>) -> T {
    a[0][0] + a[1][1]
}

/// Trace-free part of a 2-tensor.
pub fn hat2<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let h = trace2(a) * lit(0.5);
    [[a[0][0] - h, a[0][1]], [a[1][0], a[1][1] - h]]
}

pub fn dot2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> T {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

pub fn norm2_sq<T: Real>(a: &Mat2<T>) -> T {
    dot2(a, a)
}

pub fn vdot<T: Real>(a: &Vec2<T>, b: &Vec2<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

pub fn vnorm_sq<T: Real>(a: &Vec2<T>) -> T {
    vdot(a, a)
}

/// Surface Hodge dual of a 1-form, `(*ξ)_A = ε_AB ξ_B` with `ε_12 = 1`.
pub fn vdual<T: Real>(a: &Vec2<T>) -> Vec2<T> {
    [a[1], -a[0]]
}

/// Left dual of a 2-tensor, `(*θ)_AB = ε_AC θ_CB`.
pub fn mdual<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    [[a[1][0], a[1][1]], [-a[0][0], -a[0][1]]]
}

pub fn madd<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn mscale<T: Real>(s: T, a: &Mat2<T>) -> Mat2<T> {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

/// `(θ · ξ)_B = θ_AB ξ_A`, contraction on the first slot.
pub fn mv<T: Real>(a: &Mat2<T>, v: &Vec2<T>) -> Vec2<T> {
    [a[0][0] * v[0] + a[1][0] * v[1], a[0][1] * v[0] + a[1][1] * v[1]]
}

pub fn vadd<T: Real>(a: &Vec2<T>, b: &Vec2<T>) -> Vec2<T> {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vscale<T: Real>(s: T, a: &Vec2<T>) -> Vec2<T> {
    [s * a[0], s * a[1]]
}

/// `(ξ ⊗̂ ζ)` symmetrised product of 1-forms.
pub fn sym_outer<T: Real>(a: &Vec2<T>, b: &Vec2<T>) -> Mat2<T> {
    let h = lit::<T>(0.5);
    [
        [a[0] * b[0], h * (a[0] * b[1] + a[1] * b[0])],
        [h * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1]],
    ]
}
