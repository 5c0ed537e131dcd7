//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use cosmoweyl::nullframe::NullFrame;
use cosmoweyl::Result;

pub type Mat4 = [[f64; 4]; 4];

/// A double-null metric without any symmetry: nonconstant lapse, shift and
/// sphere metric.
pub fn generic_metric(x: &[f64; 4]) -> Result<Mat4> {
    let (u, v, th, ph) = (x[0], x[1], x[2], x[3]);
    let om2 = 1.5 + 0.3 * u.sin() * v.cos() + 0.1 * th.cos() * ph.sin();
    let b = [0.2 * (u + th).sin(), 0.15 * v.cos() * ph.sin()];
    let r = 2.0 + 0.3 * u + 0.5 * v;
    let gs = [
        [r * r * (1.0 + 0.1 * (u * v).sin()), r * r * 0.05 * ph.cos()],
        [r * r * 0.05 * ph.cos(), r * r * th.sin().powi(2) * (1.0 + 0.1 * u.cos())],
    ];
    let gb = [gs[0][0] * b[0] + gs[0][1] * b[1], gs[1][0] * b[0] + gs[1][1] * b[1]];
    let mut g = [[0.0; 4]; 4];
    g[0][1] = -2.0 * om2;
    g[1][0] = -2.0 * om2;
    g[1][1] = b[0] * gb[0] + b[1] * gb[1];
    for a in 0..2 {
        g[1][a + 2] = -gb[a];
        g[a + 2][1] = -gb[a];
        for c in 0..2 {
            g[a + 2][c + 2] = gs[a][c];
        }
    }
    Ok(g)
}

pub fn boost_field(x: &[f64; 4]) -> Result<f64> {
    Ok((0.2 * x[0].sin() + 0.1 * x[1] * x[2] + 0.05 * x[3].cos()).exp())
}

pub const X0: [f64; 4] = [0.3, 0.4, 1.1, 0.7];

pub fn frame_at(y: &[f64; 4]) -> Result<NullFrame<f64>> {
    NullFrame::from_metric(&generic_metric(y)?)
}

