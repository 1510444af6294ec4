//! Minimal geodesics between two points by multi-start shooting.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;

use super::chart::{BasePoint, FinslerChart};
use super::geodesic::{endpoint_with_tol, geodesic_ivp, GEODESIC_TOL};
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::model_surface::PolarPoint;
use crate::path::GeodesicPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvpOptions {
    /// Initial directions spread uniformly over the circle.
    pub seeds: usize,
    /// Endpoint miss accepted by Newton, relative to `max(1, |y − x|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Geodesics within this length of the minimum are all kept.
    pub tie_tol: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self {
            seeds: 32,
            tol: 1e-10,
            max_iter: 40,
            tie_tol: 1e-6,
        }
    }
}

/// All minimal geodesics found from `x` to `y` and the distance `d(x, y)`.
#[derive(Debug, Clone)]
pub struct MinimalGeodesics {
    pub paths: Vec<GeodesicPath>,
    pub distance: f64,
}

/// Integrator tolerance and endpoint miss accepted while screening seeds.
const SCREEN_TOL: f64 = 1e-7;
const SCREEN_MISS: f64 = 1e-5;
/// Newton iterations allowed per seed while screening; seeds that need more rarely converge.
const SCREEN_ITER: usize = 12;

fn miss(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    target: &Vector2<f64>,
    u: &Vector2<f64>,
    int_tol: f64,
) -> Result<Vector2<f64>> {
    let len = chart.norm(x, u);
    let (end, _) = endpoint_with_tol(chart, x, u, len, int_tol)?;
    Ok(end - target)
}

/// Newton iteration on the initial velocity `u` (with `F(u)` = length) so that
/// the geodesic ends at `target`.
fn newton(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    target: &Vector2<f64>,
    u0: Vector2<f64>,
    tol: f64,
    int_tol: f64,
    max_iter: usize,
) -> Option<Vector2<f64>> {
    let tol = tol * (target - x).norm().max(1.0);
    let miss = |u: &Vector2<f64>| miss(chart, x, target, u, int_tol);
    let mut u = u0;
    let mut r = miss(&u).ok()?;
    for _ in 0..max_iter {
        if r.norm() < tol {
            return Some(u);
        }
        let h = 1e-6 * u.norm().max(1e-8);
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let mut e = Vector2::zeros();
            e[k] = h;
            let rp = miss(&(u + e)).ok()?;
            let rm = miss(&(u - e)).ok()?;
            jac.set_column(k, &((rp - rm) / (2.0 * h)));
        }
        let du = -(jac.try_inverse()? * r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..16 {
            let cand = u + du * lambda;
            if chart.norm(x, &cand) > 0.0 {
                if let Ok(rc) = miss(&cand) {
                    if rc.norm() < r.norm() * (1.0 - 1e-4 * lambda) || rc.norm() < tol {
                        u = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    (r.norm() < tol).then_some(u)
}

/// Initial velocity (with `F` equal to the length) of the geodesic from `x`
/// to `y` found by Newton from a nearby guess.
pub fn solve_velocity(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
    guess: Vector2<f64>,
) -> Result<Vector2<f64>> {
    let opts = BvpOptions::default();
    newton(chart, x, y, guess, opts.tol, GEODESIC_TOL, opts.max_iter)
        .ok_or_else(|| Error::BvpNoConvergence(format!("from {x:?} to {y:?} with warm start")))
}

/// Single Newton solve from a guess for the initial velocity (length-scaled).
pub fn shoot_from_guess(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
    guess: Vector2<f64>,
) -> Result<GeodesicPath> {
    let u = solve_velocity(chart, x, y, guess)?;
    geodesic_ivp(chart, x, &u, chart.norm(x, &u))
}

/// Initial velocity of a path scaled so that its `F` equals the path length.
pub fn initial_velocity(path: &GeodesicPath) -> Vector2<f64> {
    path.start().v * path.forward_length
}

pub fn minimal_geodesic(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
) -> Result<MinimalGeodesics> {
    minimal_geodesic_with(chart, x, y, &BvpOptions::default())
}

pub fn minimal_geodesic_with(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
    opts: &BvpOptions,
) -> Result<MinimalGeodesics> {
    chart.check_point(x)?;
    chart.check_point(y)?;
    if x == y {
        return Ok(MinimalGeodesics {
            paths: vec![GeodesicPath::constant(*x, Vector2::zeros())],
            distance: 0.0,
        });
    }
    if let MetricField::Revolution(surface) = chart.metric() {
        let all =
            surface.minimal_geodesics(PolarPoint::new(x[0], x[1]), PolarPoint::new(y[0], y[1]))?;
        let distance = all[0].length;
        return Ok(MinimalGeodesics {
            paths: all.into_iter().map(|g| g.path).collect(),
            distance,
        });
    }
    let targets: Vec<Vector2<f64>> = if chart.metric().is_polar() {
        [-1.0, 0.0, 1.0]
            .iter()
            .map(|k| y + Vector2::new(0.0, 2.0 * PI * k))
            .collect()
    } else {
        vec![*y]
    };
    // a ring of initial directions per target; Newton starts from the chord
    // and from the directions whose single shot misses least among their neighbours
    let mut starts = Vec::new();
    for target in &targets {
        let d0 = chart.norm(x, &(target - x));
        starts.push((*target, target - x));
        let ring: Vec<Vector2<f64>> = (0..opts.seeds)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / opts.seeds as f64;
                let e = Vector2::new(a.cos(), a.sin());
                e * (d0 / chart.norm(x, &e))
            })
            .collect();
        let misses: Vec<f64> = ring
            .par_iter()
            .map(|u| miss(chart, x, target, u, SCREEN_TOL).map_or(f64::INFINITY, |m| m.norm()))
            .collect();
        let n = ring.len();
        for k in 0..n {
            let (prev, next) = (misses[(k + n - 1) % n], misses[(k + 1) % n]);
            if misses[k].is_finite() && misses[k] <= prev && misses[k] <= next {
                starts.push((*target, ring[k]));
            }
        }
    }
    // screen all seeds with a loose integrator, then polish the distinct survivors
    let screened: Vec<(Vector2<f64>, Vector2<f64>)> = starts
        .par_iter()
        .filter_map(|(target, u0)| {
            newton(
                chart,
                x,
                target,
                *u0,
                SCREEN_MISS,
                SCREEN_TOL,
                SCREEN_ITER.min(opts.max_iter),
            )
            .map(|u| (*target, u))
        })
        .collect();
    let mut distinct: Vec<(Vector2<f64>, Vector2<f64>)> = Vec::new();
    for (target, u) in screened {
        if !distinct
            .iter()
            .any(|(_, w)| (u - w).norm() <= 1e-4 * w.norm())
        {
            distinct.push((target, u));
        }
    }
    let found: Vec<Vector2<f64>> = distinct
        .par_iter()
        .filter_map(|(target, u0)| {
            newton(chart, x, target, *u0, opts.tol, GEODESIC_TOL, opts.max_iter)
        })
        .collect();
    let mut sols: Vec<(f64, Vector2<f64>)> = Vec::new();
    for u in found {
        let len = chart.norm(x, &u);
        if !sols.iter().any(|(_, w)| (u - w).norm() <= 1e-6 * w.norm()) {
            sols.push((len, u));
        }
    }
    if sols.is_empty() {
        return Err(Error::BvpNoConvergence(format!(
            "no seed converged from {x:?} to {y:?}"
        )));
    }
    sols.sort_by(|a, b| a.0.total_cmp(&b.0));
    let distance = sols[0].0;
    let paths = sols
        .iter()
        .filter(|(l, _)| *l <= distance + opts.tie_tol)
        .map(|(l, u)| geodesic_ivp(chart, x, u, *l))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinimalGeodesics { paths, distance })
}

/// `d(x, y)`.
pub fn distance(chart: &FinslerChart, x: &Vector2<f64>, y: &Vector2<f64>) -> Result<f64> {
    Ok(minimal_geodesic(chart, x, y)?.distance)
}

/// `d_m(x, y) = max{d(x, y), d(y, x)}`.
pub fn symmetrized_distance(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    y: &Vector2<f64>,
) -> Result<f64> {
    let forward = distance(chart, x, y)?;
    if chart.is_reversible() {
        return Ok(forward);
    }
    Ok(forward.max(distance(chart, y, x)?))
}

/// `d(p, z)` from the chart's base point.
pub fn base_distance(chart: &FinslerChart, z: &Vector2<f64>) -> Result<f64> {
    if let Some(d) = chart.closed_form_base_distance(z) {
        return Ok(d);
    }
    match chart.base() {
        BasePoint::Point(p) => distance(chart, p, z),
        BasePoint::Pole => unreachable!(),
    }
}

/// `𝒢_p(z)`: terminal unit velocities of the minimal geodesics from the base point to `z`.
pub fn radial_direction_set(chart: &FinslerChart, z: &Vector2<f64>) -> Result<Vec<Vector2<f64>>> {
    match chart.base() {
        BasePoint::Pole => {
            chart.check_point(z)?;
            Ok(vec![Vector2::new(1.0, 0.0)])
        }
        BasePoint::Point(p) => {
            if p == z {
                return Err(Error::PreconditionFailed(
                    "z coincides with the base point".into(),
                ));
            }
            Ok(terminal_directions(&minimal_geodesic(chart, p, z)?.paths))
        }
    }
}

/// End velocities of the given paths, deduplicated by angle (tolerance 1e-4).
pub fn terminal_directions(paths: &[GeodesicPath]) -> Vec<Vector2<f64>> {
    let mut dirs: Vec<Vector2<f64>> = Vec::new();
    for path in paths {
        let v = path.end().v;
        let a = v[1].atan2(v[0]);
        let dup = dirs.iter().any(|w| {
            let d = (w[1].atan2(w[0]) - a).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) < 1e-4
        });
        if !dup {
            dirs.push(v);
        }
    }
    dirs
}
