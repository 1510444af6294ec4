//! Minimal geodesics on a surface of revolution.
//!
//! Away from meridians a geodesic is a graph over θ. Writing `t' = dt/dθ`,
//! the geodesic equation becomes `t'' = f'(2t'² + f²)/f` with arclength
//! `ds/dθ = √(t'² + f²)`. Shooting from `(t₁, 0)` with initial angle `ψ` to the
//! outward meridian, the radius where the geodesic meets `θ = Δθ` decreases
//! monotonically in `ψ`, so the connecting geodesic is found by bracketing.

use std::f64::consts::PI;

use nalgebra::Vector2;

use super::ModelSurface;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Termination};
use crate::path::{GeodesicPath, PathSample};

const POLE_RADIUS: f64 = 1e-12;
const TIE_TOL: f64 = 1e-6;

/// A point in polar coordinates about the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub t: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(t: f64, theta: f64) -> Self {
        Self { t, theta }
    }
}

/// A minimal geodesic together with its vertex angles towards the pole.
#[derive(Debug, Clone)]
pub struct ModelGeodesic {
    pub length: f64,
    /// Angle at the start between the geodesic and the meridian towards the pole.
    pub start_angle: f64,
    /// Angle at the end between the reversed geodesic and the meridian towards the pole.
    pub end_angle: f64,
    /// Samples in `(t, θ)` coordinates.
    pub path: GeodesicPath,
}

enum Shot {
    Crossed(f64),
    Escaped,
    Collapsed,
}

fn wrap_angle(a: f64) -> f64 {
    // into (−π, π]
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

impl ModelSurface {
    /// `d̃(a, b)` and one minimal geodesic from `a` to `b`.
    pub fn surface_distance(&self, a: PolarPoint, b: PolarPoint) -> Result<(f64, GeodesicPath)> {
        let mut all = self.minimal_geodesics(a, b)?;
        let g = all.swap_remove(0);
        Ok((g.length, g.path))
    }

    /// All minimal geodesics from `a` to `b` (lengths within `1e-6` of the minimum), shortest first.
    pub fn minimal_geodesics(&self, a: PolarPoint, b: PolarPoint) -> Result<Vec<ModelGeodesic>> {
        for p in [a, b] {
            if !(p.t >= 0.0) || p.t > self.t_max * (1.0 + 1e-12) {
                return Err(Error::TruncationTooShort(format!(
                    "point at radius {} outside [0, {}]",
                    p.t, self.t_max
                )));
            }
        }
        let dtheta = wrap_angle(b.theta - a.theta);
        if a.t <= POLE_RADIUS || b.t <= POLE_RADIUS || dtheta == 0.0 {
            return Ok(vec![meridian(a, b)]);
        }
        let sign = if dtheta < 0.0 { -1.0 } else { 1.0 };
        let abs_dt = dtheta.abs();
        if abs_dt < PI {
            let g = self.clairaut(a, b.t, sign, abs_dt)?;
            return match g {
                Some(g) => Ok(vec![g]),
                None => Err(Error::TruncationTooShort(format!(
                    "no geodesic inside t_max = {} joins the points",
                    self.t_max
                ))),
            };
        }
        // opposite meridians: through the pole or around either side
        let mut cands = vec![through_pole(a, b)];
        for s in [1.0, -1.0] {
            if let Some(g) = self.clairaut(a, b.t, s, PI)? {
                cands.push(g);
            }
        }
        cands.sort_by(|x, y| x.length.total_cmp(&y.length));
        let best = cands[0].length;
        cands.retain(|g| g.length <= best + TIE_TOL);
        Ok(cands)
    }

    fn shoot(&self, t1: f64, psi: f64, dtheta: f64) -> Shot {
        match self.integrate_theta(t1, psi, dtheta, f64::INFINITY) {
            Ok(sol) => match sol.termination {
                Termination::Stopped => {
                    if sol.y_end()[0] <= POLE_RADIUS * 10.0 {
                        Shot::Collapsed
                    } else {
                        Shot::Escaped
                    }
                }
                _ => Shot::Crossed(sol.y_end()[0]),
            },
            Err(_) => {
                if psi > 0.5 * PI {
                    Shot::Collapsed
                } else {
                    Shot::Escaped
                }
            }
        }
    }

    fn integrate_theta(
        &self,
        t1: f64,
        psi: f64,
        dtheta: f64,
        max_step: f64,
    ) -> Result<ode::Solution<3>> {
        let f1 = self.f(t1);
        let y0 = [t1, f1 * psi.cos() / psi.sin(), 0.0];
        let mut rhs = |_th: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
            let [f, df, _] = self.derivs(y[0].max(POLE_RADIUS));
            let p = y[1];
            Ok([p, df * (2.0 * p * p + f * f) / f, (p * p + f * f).sqrt()])
        };
        let t_hi = self.t_max * (1.0 + 1e-12);
        let mut stop = |_th: f64, y: &[f64; 3]| y[0] > t_hi || y[0] < POLE_RADIUS * 10.0;
        let opts = OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_step,
            max_steps: 200_000,
        };
        ode::integrate(&mut rhs, 0.0, y0, dtheta, &opts, None, Some(&mut stop))
    }

    /// The geodesic from `a` to radius `t2` at angular offset `sign·Δθ`, Δθ ∈ (0, π].
    fn clairaut(
        &self,
        a: PolarPoint,
        t2: f64,
        sign: f64,
        dtheta: f64,
    ) -> Result<Option<ModelGeodesic>> {
        let resid = |psi: f64| -> f64 {
            match self.shoot(a.t, psi, dtheta) {
                Shot::Crossed(r) => r - t2,
                Shot::Escaped => f64::INFINITY,
                Shot::Collapsed => -t2,
            }
        };
        let mut lo = 1e-9;
        let mut g_lo = resid(lo);
        if g_lo < 0.0 {
            return Ok(None);
        }
        let mut hi = f64::NAN;
        let mut g_hi = f64::NAN;
        for eps in [1e-3, 1e-6, 1e-9] {
            let h = PI - eps;
            let g = resid(h);
            if g < 0.0 {
                hi = h;
                g_hi = g;
                break;
            }
            if dtheta >= PI {
                // crossing radius tends to the cut radius, never to zero
                break;
            }
        }
        if hi.is_nan() {
            return Ok(None);
        }
        let tol_g = 1e-14 * t2.max(1.0);
        // Illinois false position, bisection while one end is unbounded
        let mut side = 0i8;
        for _ in 0..300 {
            if hi - lo <= 1e-15 {
                break;
            }
            let m = if g_lo.is_finite() {
                let m = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
                if m > lo && m < hi {
                    m
                } else {
                    0.5 * (lo + hi)
                }
            } else {
                0.5 * (lo + hi)
            };
            let gm = resid(m);
            if gm.abs() <= tol_g {
                lo = m;
                hi = m;
                break;
            }
            if gm > 0.0 {
                lo = m;
                g_lo = gm;
                if side == 1 {
                    g_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = m;
                g_hi = gm;
                if side == -1 && g_lo.is_finite() {
                    g_lo *= 0.5;
                }
                side = -1;
            }
        }
        let psi = 0.5 * (lo + hi);
        self.trace(a, psi, sign, dtheta).map(Some)
    }

    fn trace(&self, a: PolarPoint, psi: f64, sign: f64, dtheta: f64) -> Result<ModelGeodesic> {
        let sol = self.integrate_theta(a.t, psi, dtheta, dtheta / 256.0)?;
        if sol.termination != Termination::ReachedEnd {
            return Err(Error::TruncationTooShort(
                "geodesic leaves the truncated surface".into(),
            ));
        }
        let samples: Vec<PathSample> = sol
            .ts
            .iter()
            .zip(&sol.ys)
            .map(|(th, y)| {
                let f = self.f(y[0]);
                let w = (y[1] * y[1] + f * f).sqrt();
                PathSample {
                    s: y[2],
                    x: Vector2::new(y[0], a.theta + sign * th),
                    v: Vector2::new(y[1] / w, sign / w),
                }
            })
            .collect();
        let end = sol.y_end();
        let f_end = self.f(end[0]);
        let w_end = (end[1] * end[1] + f_end * f_end).sqrt();
        Ok(ModelGeodesic {
            length: end[2],
            start_angle: PI - psi,
            end_angle: (end[1] / w_end).clamp(-1.0, 1.0).acos(),
            path: GeodesicPath {
                samples,
                forward_length: end[2],
                reverse_length: end[2],
            },
        })
    }
}

fn meridian(a: PolarPoint, b: PolarPoint) -> ModelGeodesic {
    let len = (b.t - a.t).abs();
    // a geodesic from the pole runs along b's meridian, and vice versa
    let theta = if a.t <= POLE_RADIUS { b.theta } else { a.theta };
    let dir = if b.t >= a.t { 1.0 } else { -1.0 };
    let n = 64;
    let samples = (0..=n)
        .map(|k| {
            let s = len * k as f64 / n as f64;
            PathSample {
                s,
                x: Vector2::new(a.t + dir * s, theta),
                v: Vector2::new(dir, 0.0),
            }
        })
        .collect();
    let (start_angle, end_angle) = if dir > 0.0 { (PI, 0.0) } else { (0.0, PI) };
    ModelGeodesic {
        length: len,
        start_angle,
        end_angle,
        path: GeodesicPath {
            samples,
            forward_length: len,
            reverse_length: len,
        },
    }
}

fn through_pole(a: PolarPoint, b: PolarPoint) -> ModelGeodesic {
    let len = a.t + b.t;
    let n = 64;
    let mut samples = Vec::with_capacity(2 * n + 2);
    for k in 0..=n {
        let s = a.t * k as f64 / n as f64;
        samples.push(PathSample {
            s,
            x: Vector2::new(a.t - s, a.theta),
            v: Vector2::new(-1.0, 0.0),
        });
    }
    for k in 0..=n {
        let r = b.t * k as f64 / n as f64;
        samples.push(PathSample {
            s: a.t + r,
            x: Vector2::new(r, b.theta),
            v: Vector2::new(1.0, 0.0),
        });
    }
    ModelGeodesic {
        length: len,
        start_angle: 0.0,
        end_angle: 0.0,
        path: GeodesicPath {
            samples,
            forward_length: len,
            reverse_length: len,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_surface::{build_profile, ClosedForm, ProfileSpec};

    fn plane() -> ModelSurface {
        build_profile(ProfileSpec::ClosedForm(ClosedForm::Plane), 20.0).unwrap()
    }

    #[test]
    fn planar_right_angle() {
        let s = plane();
        let g = s
            .minimal_geodesics(PolarPoint::new(3.0, 0.0), PolarPoint::new(4.0, PI / 2.0))
            .unwrap();
        assert_eq!(g.len(), 1);
        assert!((g[0].length - 5.0).abs() < 1e-9);
        // angle at (3,0) between the segment and the direction to the origin
        assert!((g[0].start_angle - (3.0f64 / 5.0).acos()).abs() < 1e-8);
        assert!((g[0].end_angle - (4.0f64 / 5.0).acos()).abs() < 1e-8);
        let end = g[0].path.end().x;
        assert!((end[0] - 4.0).abs() < 1e-9 && (end[1] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn clockwise_offsets_mirror() {
        let s = plane();
        let (d, p) = s
            .surface_distance(PolarPoint::new(2.0, 1.0), PolarPoint::new(2.0, 0.0))
            .unwrap();
        assert!((d - 4.0 * 0.5f64.sin()).abs() < 1e-9);
        assert!((p.end().x[1]).abs() < 1e-12);
    }

    #[test]
    fn meridian_and_pole() {
        let s = plane();
        let (d, _) = s
            .surface_distance(PolarPoint::new(1.0, 0.3), PolarPoint::new(2.5, 0.3))
            .unwrap();
        assert_eq!(d, 1.5);
        let (d, _) = s
            .surface_distance(PolarPoint::new(0.0, 0.0), PolarPoint::new(2.5, 1.3))
            .unwrap();
        assert_eq!(d, 2.5);
        let g = s
            .minimal_geodesics(PolarPoint::new(1.0, 0.0), PolarPoint::new(2.0, PI))
            .unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].length, 3.0);
    }

    #[test]
    fn hyperbolic_law_of_cosines() {
        let s = build_profile(ProfileSpec::ClosedForm(ClosedForm::Hyperbolic), 6.0).unwrap();
        let (a, b, th): (f64, f64, f64) = (1.0, 1.5, 2.0);
        let want = (a.cosh() * b.cosh() - a.sinh() * b.sinh() * th.cos()).acosh();
        let (d, _) = s
            .surface_distance(PolarPoint::new(a, 0.0), PolarPoint::new(b, th))
            .unwrap();
        assert!((d - want).abs() < 1e-9, "{d} vs {want}");
    }
}
