use nalgebra::Vector2;

use crate::angles::{angle_difference_quotient, Side};
use crate::error::{Error, Result};
use crate::manifold::{minimal_geodesic, BasePoint, FinslerChart};
use crate::path::{GeodesicPath, PathSample};
use crate::quad;

/// `△(→px, →py) = (p, x, y; γ, σ, c)` with `p` the base point of the chart.
#[derive(Debug, Clone)]
pub struct ForwardTriangle {
    /// `None` when `p` is the pole of a polar chart.
    pub p: Option<Vector2<f64>>,
    pub x: Vector2<f64>,
    pub y: Vector2<f64>,
    pub gamma: GeodesicPath,
    pub sigma: GeodesicPath,
    pub c: GeodesicPath,
    pub d_px: f64,
    pub d_py: f64,
    pub d_xy: f64,
    /// `max{d(x, y), d(y, x)}`
    pub d_m_xy: f64,
    pub l_m: f64,
    pub forward_angle_x: f64,
    pub backward_angle_y: f64,
}

/// `L_m(c) = ∫ max{F(ċ), F(−ċ)} ds` for a unit-speed path.
pub fn measured_edge_length(chart: &FinslerChart, c: &GeodesicPath) -> f64 {
    if c.forward_length == 0.0 {
        return 0.0;
    }
    quad::integrate(
        |s| {
            let (x, v) = c.point_at(s);
            chart.norm(&x, &v).max(chart.norm(&x, &(-v)))
        },
        0.0,
        c.forward_length,
        1e-12,
    )
}

/// The meridian from the pole to `(t, θ)`.
fn meridian(x: &Vector2<f64>) -> GeodesicPath {
    let n = 64;
    let samples = (0..=n)
        .map(|k| {
            let s = x[0] * k as f64 / n as f64;
            PathSample {
                s,
                x: Vector2::new(s, x[1]),
                v: Vector2::new(1.0, 0.0),
            }
        })
        .collect();
    GeodesicPath {
        samples,
        forward_length: x[0],
        reverse_length: x[0],
    }
}

fn radial(chart: &FinslerChart, z: &Vector2<f64>) -> Result<GeodesicPath> {
    match chart.base() {
        BasePoint::Pole => {
            chart.check_point(z)?;
            Ok(meridian(z))
        }
        BasePoint::Point(p) => Ok(minimal_geodesic(chart, p, z)?.paths.swap_remove(0)),
    }
}

/// Builds the forward triangle with vertices `p` (the chart's base point), `x`, `y`
/// and measures its angles at `x` and `y` by difference quotients.
pub fn forward_triangle(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
) -> Result<ForwardTriangle> {
    if x == y {
        return Err(Error::PreconditionFailed("x and y coincide".into()));
    }
    let gamma = radial(chart, x)?;
    let sigma = radial(chart, y)?;
    let edge = minimal_geodesic(chart, x, y)?;
    let back = minimal_geodesic(chart, y, x)?;
    let c = edge.paths.into_iter().next().unwrap();
    let fwd = angle_difference_quotient(chart, &c, 0.0, Side::Forward)?;
    let bwd = angle_difference_quotient(chart, &c, c.forward_length, Side::Backward)?;
    Ok(ForwardTriangle {
        p: match chart.base() {
            BasePoint::Pole => None,
            BasePoint::Point(p) => Some(*p),
        },
        x: *x,
        y: *y,
        d_px: gamma.forward_length,
        d_py: sigma.forward_length,
        d_xy: edge.distance,
        d_m_xy: edge.distance.max(back.distance),
        l_m: measured_edge_length(chart, &c),
        forward_angle_x: fwd.forward_angle.unwrap(),
        backward_angle_y: bwd.backward_angle.unwrap(),
        gamma,
        sigma,
        c,
    })
}
