//! Geodesic initial value problems.

use nalgebra::Vector2;

use super::chart::FinslerChart;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Solution, Termination};
use crate::path::{GeodesicPath, PathSample};

/// Integrator tolerance for geodesics.
pub const GEODESIC_TOL: f64 = 1e-11;

/// Integrates the unit-speed geodesic `ẍ + 2G(x, ẋ) = 0` from `(x, v/F(v))`.
/// The state carries `∫ F(−ẋ)` as a fifth component.
pub(crate) fn integrate(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    length: f64,
    max_step: f64,
    tol: f64,
) -> Result<Solution<5>> {
    chart.check_point(x)?;
    let speed = chart.norm(x, v);
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::InvalidVector(format!("cannot normalise {v:?}")));
    }
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::PreconditionFailed(format!(
            "invalid geodesic length {length}"
        )));
    }
    let u = v / speed;
    let mut rhs = |_s: f64, y: &[f64; 5]| -> Result<[f64; 5]> {
        let p = Vector2::new(y[0], y[1]);
        let w = Vector2::new(y[2], y[3]);
        let g = chart.spray(&p, &w)?;
        Ok([w[0], w[1], -2.0 * g[0], -2.0 * g[1], chart.norm(&p, &(-w))])
    };
    let mut outside = |_s: f64, y: &[f64; 5]| !chart.contains(&Vector2::new(y[0], y[1]));
    let opts = OdeOptions {
        rtol: tol,
        atol: tol * 1e-2,
        max_step,
        max_steps: 100_000,
    };
    let y0 = [x[0], x[1], u[0], u[1], 0.0];
    let sol = ode::integrate(&mut rhs, 0.0, y0, length, &opts, None, Some(&mut outside))?;
    if sol.termination == Termination::Stopped {
        let y = sol.y_end();
        return Err(Error::ChartExit(y[0], y[1]));
    }
    Ok(sol)
}

/// End point and end velocity of the unit-speed geodesic of the given length.
pub fn geodesic_endpoint(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    length: f64,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    endpoint_with_tol(chart, x, v, length, GEODESIC_TOL)
}

pub(crate) fn endpoint_with_tol(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    length: f64,
    tol: f64,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    let y = integrate(chart, x, v, length, f64::INFINITY, tol)?.y_end();
    Ok((Vector2::new(y[0], y[1]), Vector2::new(y[2], y[3])))
}

/// The unit-speed geodesic from `(x, v)` with the given forward length.
pub fn geodesic_ivp(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    length: f64,
) -> Result<GeodesicPath> {
    let sol = integrate(
        chart,
        x,
        v,
        length,
        (length / 64.0).max(1e-12),
        GEODESIC_TOL,
    )?;
    Ok(to_path(&sol))
}

pub(crate) fn to_path(sol: &Solution<5>) -> GeodesicPath {
    let samples = sol
        .ts
        .iter()
        .zip(&sol.ys)
        .map(|(s, y)| PathSample {
            s: *s,
            x: Vector2::new(y[0], y[1]),
            v: Vector2::new(y[2], y[3]),
        })
        .collect();
    let end = sol.y_end();
    GeodesicPath {
        samples,
        forward_length: sol.t_end(),
        reverse_length: end[4],
    }
}

/// The geodesic `c` with `c(0) = x`, `ċ(0) = v` (speed not normalised) over
/// the parameter range from 0 to `s`, which may be negative.
pub(crate) fn flow(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    s: f64,
    max_step: f64,
) -> Result<Solution<4>> {
    chart.check_point(x)?;
    crate::norms::check_nonzero(v)?;
    let mut rhs = |_s: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let g = chart.spray(&Vector2::new(y[0], y[1]), &Vector2::new(y[2], y[3]))?;
        Ok([y[2], y[3], -2.0 * g[0], -2.0 * g[1]])
    };
    let mut outside = |_s: f64, y: &[f64; 4]| !chart.contains(&Vector2::new(y[0], y[1]));
    let opts = OdeOptions {
        rtol: GEODESIC_TOL,
        atol: GEODESIC_TOL * 1e-2,
        max_step,
        max_steps: 100_000,
    };
    let sol = ode::integrate(
        &mut rhs,
        0.0,
        [x[0], x[1], v[0], v[1]],
        s,
        &opts,
        None,
        Some(&mut outside),
    )?;
    if sol.termination == Termination::Stopped {
        let y = sol.y_end();
        return Err(Error::ChartExit(y[0], y[1]));
    }
    Ok(sol)
}

/// Position and velocity `(c(s), ċ(s))` of the geodesic with `c(0) = x`, `ċ(0) = v`.
/// Negative `s` runs the geodesic backwards in time, which differs from
/// following `−v` when the metric is not reversible.
pub fn geodesic_flow(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    v: &Vector2<f64>,
    s: f64,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    let y = flow(chart, x, v, s, f64::INFINITY)?.y_end();
    Ok((Vector2::new(y[0], y[1]), Vector2::new(y[2], y[3])))
}

/// Largest defect between consecutive samples: each sample `(x_k, ẋ_k)` is
/// advanced as a constant-speed geodesic to `s_{k+1}` and compared with `x_{k+1}`.
pub fn geodesic_residual(chart: &FinslerChart, path: &GeodesicPath) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in path.samples.windows(2) {
        let ds = w[1].s - w[0].s;
        if ds <= 0.0 {
            continue;
        }
        let speed = chart.norm(&w[0].x, &w[0].v);
        let (end, _) = geodesic_endpoint(chart, &w[0].x, &w[0].v, speed * ds)?;
        worst = worst.max((end - w[1].x).norm());
    }
    Ok(worst)
}
