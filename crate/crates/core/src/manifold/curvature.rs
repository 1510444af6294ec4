//! Flag curvature and tangent curvature.
//!
//! The spray `G` and fundamental tensor `g` come from automatic
//! differentiation of `½F²`. Their first and second derivatives in `(x, v)`
//! are taken by central differences with one Richardson step, which leaves
//! an error of order `h⁴` (about 1e-10 at the default step).

use nalgebra::{Matrix2, Vector2};

use super::chart::FinslerChart;
use crate::error::{Error, Result};

const STEP: f64 = 1e-3;

type Point4 = [f64; 4];

fn shift(z: &Point4, a: usize, h: f64) -> Point4 {
    let mut out = *z;
    out[a] += h;
    out
}

/// Derivative of a vector-valued function of `(x, v)` along coordinate `a`.
fn d1<const M: usize>(
    f: &impl Fn(&Point4) -> Result<[f64; M]>,
    z: &Point4,
    a: usize,
    h: f64,
) -> Result<[f64; M]> {
    let central = |h: f64| -> Result<[f64; M]> {
        let p = f(&shift(z, a, h))?;
        let m = f(&shift(z, a, -h))?;
        Ok(std::array::from_fn(|i| (p[i] - m[i]) / (2.0 * h)))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(std::array::from_fn(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
}

/// Second derivative along coordinates `a`, `b`.
fn d2<const M: usize>(
    f: &impl Fn(&Point4) -> Result<[f64; M]>,
    z: &Point4,
    a: usize,
    b: usize,
    ha: f64,
    hb: f64,
) -> Result<[f64; M]> {
    let stencil = |s: f64| -> Result<[f64; M]> {
        let (ha, hb) = (ha * s, hb * s);
        if a == b {
            let p = f(&shift(z, a, ha))?;
            let c = f(z)?;
            let m = f(&shift(z, a, -ha))?;
            Ok(std::array::from_fn(|i| {
                (p[i] - 2.0 * c[i] + m[i]) / (ha * ha)
            }))
        } else {
            let pp = f(&shift(&shift(z, a, ha), b, hb))?;
            let pm = f(&shift(&shift(z, a, ha), b, -hb))?;
            let mp = f(&shift(&shift(z, a, -ha), b, hb))?;
            let mm = f(&shift(&shift(z, a, -ha), b, -hb))?;
            Ok(std::array::from_fn(|i| {
                (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * ha * hb)
            }))
        }
    };
    let coarse = stencil(1.0)?;
    let fine = stencil(0.5)?;
    Ok(std::array::from_fn(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
}

/// Steps in `(x, v)`. Near the pole of a polar chart the spray grows like
/// `1/t`, so the radial step shrinks with the radius there.
fn steps(chart: &FinslerChart, x: &Vector2<f64>, v: &Vector2<f64>) -> [f64; 4] {
    let hv = STEP * v.norm();
    let hx = if chart.metric().is_polar() {
        STEP.min(0.01 * x[0])
    } else {
        STEP
    };
    [hx, hx, hv, hv]
}

fn spray_fn(chart: &FinslerChart) -> impl Fn(&Point4) -> Result<[f64; 2]> + '_ {
    move |z: &Point4| {
        let g = chart.spray(&Vector2::new(z[0], z[1]), &Vector2::new(z[2], z[3]))?;
        Ok([g[0], g[1]])
    }
}

/// The Riemann curvature operator `R_v = (R^i_k)` of the spray at `(x, v)`.
pub fn riemann_operator(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
) -> Result<Matrix2<f64>> {
    crate::norms::check_nonzero(v)?;
    let f = spray_fn(chart);
    let z = [x[0], x[1], v[0], v[1]];
    let h = steps(chart, x, v);
    let g = f(&z)?;
    // first derivatives: index by coordinate 0..4
    let first: Vec<[f64; 2]> = (0..4).map(|a| d1(&f, &z, a, h[a])).collect::<Result<_>>()?;
    let mut r = Matrix2::zeros();
    for k in 0..2 {
        let mixed: Vec<[f64; 2]> = (0..2)
            .map(|j| d2(&f, &z, j, 2 + k, h[j], h[2 + k]))
            .collect::<Result<_>>()?;
        let vert: Vec<[f64; 2]> = (0..2)
            .map(|j| d2(&f, &z, 2 + j, 2 + k, h[2 + j], h[2 + k]))
            .collect::<Result<_>>()?;
        for i in 0..2 {
            let mut val = 2.0 * first[k][i];
            for j in 0..2 {
                val -= v[j] * mixed[j][i];
                val += 2.0 * g[j] * vert[j][i];
                val -= first[2 + j][i] * first[2 + k][j];
            }
            r[(i, k)] = val;
        }
    }
    Ok(r)
}

/// The nonlinear connection `N^i_j = ∂G^i/∂v^j` at `(x, v)`.
pub fn nonlinear_connection(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
) -> Result<Matrix2<f64>> {
    crate::norms::check_nonzero(v)?;
    let f = spray_fn(chart);
    let z = [x[0], x[1], v[0], v[1]];
    let h = steps(chart, x, v);
    let mut nl = Matrix2::zeros();
    for j in 0..2 {
        let d = d1(&f, &z, 2 + j, h[2 + j])?;
        for m in 0..2 {
            nl[(m, j)] = d[m];
        }
    }
    Ok(nl)
}

/// `K(v, w) = g_v(R_v(w), w) / (g_v(v,v) g_v(w,w) − g_v(v,w)²)`.
pub fn flag_curvature(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    w: &Vector2<f64>,
) -> Result<f64> {
    let gv = chart.tensor(x, v)?;
    let den = gv.norm_sq(v) * gv.norm_sq(w) - gv.inner(v, w).powi(2);
    let scale = gv.norm_sq(v) * gv.norm_sq(w);
    if !(den > 1e-10 * scale) {
        return Err(Error::DegenerateFlag(den));
    }
    let r = riemann_operator(chart, x, v)?;
    Ok(gv.inner(&(r * w), w) / den)
}

/// Chern connection coefficients `Γ^i_{jk}(v)` at `x`, indexed `[i][j][k]`.
pub fn chern_connection(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
) -> Result<[[[f64; 2]; 2]; 2]> {
    crate::norms::check_nonzero(v)?;
    let z = [x[0], x[1], v[0], v[1]];
    let h = steps(chart, x, v);
    let tensor = |z: &Point4| -> Result<[f64; 4]> {
        let m = chart
            .tensor(&Vector2::new(z[0], z[1]), &Vector2::new(z[2], z[3]))?
            .matrix;
        Ok([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    };
    let nl = nonlinear_connection(chart, x, v)?;
    let dg: Vec<[f64; 4]> = (0..4)
        .map(|a| d1(&tensor, &z, a, h[a]))
        .collect::<Result<_>>()?;
    let gidx = |arr: &[f64; 4], l: usize, k: usize| arr[2 * l + k];
    // δ_j g_{lk}
    let delta = |j: usize, l: usize, k: usize| -> f64 {
        let mut val = gidx(&dg[j], l, k);
        for m in 0..2 {
            val -= nl[(m, j)] * gidx(&dg[2 + m], l, k);
        }
        val
    };
    let ginv = chart
        .tensor(x, v)?
        .matrix
        .try_inverse()
        .ok_or(Error::StrongConvexityViolated(0.0))?;
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut s = 0.0;
                for l in 0..2 {
                    s += ginv[(i, l)] * (delta(j, l, k) + delta(k, j, l) - delta(l, j, k));
                }
                gamma[i][j][k] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

fn contract(gamma: &[[[f64; 2]; 2]; 2], w: &Vector2<f64>) -> Vector2<f64> {
    let mut out = Vector2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i] += gamma[i][j][k] * w[j] * w[k];
            }
        }
    }
    out
}

/// `𝒯(v, w) = g_v(D^W_W W − D^V_W W, V)` for constant-coefficient extensions `V`, `W` of `v`, `w`.
pub fn tangent_curvature(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    w: &Vector2<f64>,
) -> Result<f64> {
    crate::norms::check_nonzero(w)?;
    let gw = chart_gamma(chart, x, w)?;
    let gv = chart_gamma(chart, x, v)?;
    let diff = contract(&gw, w) - contract(&gv, w);
    Ok(chart.tensor(x, v)?.inner(&diff, v))
}

fn chart_gamma(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
) -> Result<[[[f64; 2]; 2]; 2]> {
    chern_connection(chart, x, v)
}
