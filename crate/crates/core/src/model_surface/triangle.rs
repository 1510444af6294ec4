//! Comparison triangles `△(p̃x̃ỹ)` and the gluing inequality for pairs of them.

use std::f64::consts::PI;

use super::geodesics::{ModelGeodesic, PolarPoint};
use super::ModelSurface;
use crate::error::{Error, Result};
use crate::path::GeodesicPath;

/// A geodesic triangle with one vertex at the pole, `x̃` on the meridian `θ = 0`
/// and `ỹ` at `θ = Δθ ∈ [0, π]`.
#[derive(Debug, Clone)]
pub struct ComparisonTriangle {
    pub side_px: f64,
    pub side_py: f64,
    pub side_xy: f64,
    pub delta_theta: f64,
    pub angle_p: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub x: PolarPoint,
    pub y: PolarPoint,
    pub geodesic_xy: GeodesicPath,
}

/// Angles of two comparison triangles sharing the edge `p̃ỹ`, and of the glued triangle `△(p̃q̃r̃)`.
#[derive(Debug, Clone)]
pub struct DoubleTriangleReport {
    pub glued: ComparisonTriangle,
    /// `∠(p̃ỹx̃) + ∠(p̃ỹz̃)`
    pub angle_sum_at_y: f64,
    pub angle_x: f64,
    pub angle_q: f64,
    pub angle_z: f64,
    pub angle_r: f64,
    pub theta_z: f64,
}

impl DoubleTriangleReport {
    /// `min(∠x̃ − ∠q̃, ∠z̃ − ∠r̃)`; non-negative when the inequalities hold.
    pub fn slack(&self) -> f64 {
        (self.angle_x - self.angle_q).min(self.angle_z - self.angle_r)
    }

    pub fn theta_z_below_pi(&self) -> bool {
        self.theta_z < PI
    }
}

/// Places `x̃ = (d_px, 0)` and finds `Δθ` with `d̃(x̃, (d_py, Δθ)) = side_xy`.
///
/// Requires a von Mangoldt surface, where the distance is increasing in `Δθ`.
pub fn comparison_triangle(
    surface: &ModelSurface,
    d_px: f64,
    d_py: f64,
    side_xy: f64,
) -> Result<ComparisonTriangle> {
    if !surface.is_von_mangoldt() {
        return Err(Error::Unsupported(
            "comparison triangles need a non-increasing radial curvature".into(),
        ));
    }
    for s in [d_px, d_py, side_xy] {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::PreconditionFailed(format!(
                "side lengths must be positive, got {s}"
            )));
        }
    }
    if d_px.max(d_py) > surface.t_max() {
        return Err(Error::TruncationTooShort(format!(
            "side {} exceeds t_max = {}",
            d_px.max(d_py),
            surface.t_max()
        )));
    }
    let tol = 1e-12 * (d_px + d_py);
    let lower = (d_px - d_py).abs();
    if side_xy < lower - tol || side_xy > d_px + d_py + tol {
        return Err(Error::NoComparisonTriangle);
    }
    let x = PolarPoint::new(d_px, 0.0);
    let at = |dt: f64| -> Result<ModelGeodesic> {
        Ok(surface
            .minimal_geodesics(x, PolarPoint::new(d_py, dt))?
            .swap_remove(0))
    };
    let build = |dt: f64, g: ModelGeodesic| ComparisonTriangle {
        side_px: d_px,
        side_py: d_py,
        side_xy,
        delta_theta: dt,
        angle_p: dt,
        angle_x: g.start_angle,
        angle_y: g.end_angle,
        x,
        y: PolarPoint::new(d_py, dt),
        geodesic_xy: g.path,
    };
    if side_xy <= lower + tol {
        return Ok(build(0.0, at(0.0)?));
    }
    let g_pi = at(PI)?;
    let r_pi = g_pi.length - side_xy;
    if r_pi < -1e-10 * side_xy.max(1.0) {
        return Err(Error::NoComparisonTriangle);
    }
    if r_pi <= tol {
        return Ok(build(PI, g_pi));
    }
    let (mut lo, mut g_lo) = (0.0, lower - side_xy);
    let (mut hi, mut g_hi) = (PI, r_pi);
    let mut side = 0i8;
    let mut best: Option<(f64, ModelGeodesic)> = None;
    for _ in 0..200 {
        let mut m = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let g = at(m)?;
        let r = g.length - side_xy;
        let done = r.abs() <= 1e-13 * side_xy.max(1.0) || hi - lo <= 1e-15;
        best = Some((m, g));
        if done {
            break;
        }
        if r < 0.0 {
            lo = m;
            g_lo = r;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = m;
            g_hi = r;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    let (dt, g) = best.unwrap();
    Ok(build(dt, g))
}

/// Glues `△(p̃x̃ỹ)` and `△(p̃ỹz̃)` along `p̃ỹ` and compares their angles at `x̃`, `z̃`
/// with those of the comparison triangle having side `d̃(x̃,ỹ) + d̃(ỹ,z̃)`.
pub fn double_triangle_check(
    surface: &ModelSurface,
    x: PolarPoint,
    y: PolarPoint,
    z: PolarPoint,
) -> Result<DoubleTriangleReport> {
    let ty = y.theta - x.theta;
    let tz = z.theta - x.theta;
    if !(0.0 < ty && ty < tz && tz < 2.0 * PI) {
        return Err(Error::PreconditionFailed(format!(
            "need 0 < θ(y) < θ(z) relative to x, got {ty}, {tz}"
        )));
    }
    if tz - ty > PI || ty > PI {
        return Err(Error::PreconditionFailed(
            "each triangle must span at most π".into(),
        ));
    }
    let first = surface.minimal_geodesics(x, y)?.swap_remove(0);
    let second = surface.minimal_geodesics(y, z)?.swap_remove(0);
    let sum = first.end_angle + second.start_angle;
    if sum > PI + 1e-9 {
        return Err(Error::PreconditionFailed(format!(
            "angles at y sum to {sum} > π"
        )));
    }
    let glued = comparison_triangle(surface, x.t, z.t, first.length + second.length)?;
    Ok(DoubleTriangleReport {
        angle_sum_at_y: sum,
        angle_x: first.start_angle,
        angle_q: glued.angle_x,
        angle_z: second.end_angle,
        angle_r: glued.angle_y,
        theta_z: tz,
        glued,
    })
}
