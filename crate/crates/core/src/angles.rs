//! Forward and backward angles at a point of a geodesic, seen from the base
//! point `p`, computed as difference-quotient limits of distances and through
//! the first variation formula.

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::manifold::{
    initial_velocity, minimal_geodesic, solve_velocity, terminal_directions, BasePoint,
    FinslerChart,
};
use crate::path::GeodesicPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Forward,
    Backward,
    Both,
}

impl Side {
    fn forward(self) -> bool {
        matches!(self, Self::Forward | Self::Both)
    }
    fn backward(self) -> bool {
        matches!(self, Self::Backward | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AngleMethod {
    /// Steps `h` at which the quotient was evaluated.
    DifferenceQuotient {
        steps: Vec<f64>,
    },
    FirstVariation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleMeasurement {
    pub forward_angle: Option<f64>,
    pub backward_angle: Option<f64>,
    /// `max{1, F(−ċ)}`
    pub lambda: f64,
    pub method: AngleMethod,
}

fn angle_of(cos: f64) -> f64 {
    cos.clamp(-1.0, 1.0).acos()
}

/// `d(p, ·)` near a fixed point `z`, warm-started from the minimal geodesics
/// `p → z`. Also carries `𝒢_p(z)`.
pub struct BaseDistance<'a> {
    chart: &'a FinslerChart,
    guesses: Vec<Vector2<f64>>,
    directions: Vec<Vector2<f64>>,
}

impl<'a> BaseDistance<'a> {
    pub fn new(chart: &'a FinslerChart, z: &Vector2<f64>) -> Result<Self> {
        match chart.base() {
            BasePoint::Pole => {
                chart.check_point(z)?;
                Ok(Self {
                    chart,
                    guesses: Vec::new(),
                    directions: vec![Vector2::new(1.0, 0.0)],
                })
            }
            BasePoint::Point(p) => {
                if p == z {
                    return Err(Error::PreconditionFailed(
                        "point coincides with the base point".into(),
                    ));
                }
                let sol = minimal_geodesic(chart, p, z)?;
                Ok(Self {
                    chart,
                    guesses: sol.paths.iter().map(initial_velocity).collect(),
                    directions: terminal_directions(&sol.paths),
                })
            }
        }
    }

    /// `𝒢_p(z)`.
    pub fn directions(&self) -> &[Vector2<f64>] {
        &self.directions
    }

    /// `d(p, y)` for `y` close to `z`: the shortest of the geodesics obtained
    /// by continuing each minimal geodesic to `z`.
    pub fn at(&self, y: &Vector2<f64>) -> Result<f64> {
        if let Some(d) = self.chart.closed_form_base_distance(y) {
            return Ok(d);
        }
        let BasePoint::Point(p) = self.chart.base() else {
            unreachable!()
        };
        let mut best = f64::INFINITY;
        let mut last_err = None;
        for g in &self.guesses {
            match solve_velocity(self.chart, p, y, *g) {
                Ok(u) => best = best.min(self.chart.norm(p, &u)),
                Err(e) => last_err = Some(e),
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(last_err.unwrap_or_else(|| Error::BvpNoConvergence("no warm start".into())))
        }
    }
}

/// Angles from the first variation formula: with `λ = max{1, F(−ċ)}`,
/// `cos ∠→ = −λ⁻¹ min g_v(v, ċ)` and `cos ∠← = λ⁻¹ max g_v(v, ċ)` over `v ∈ 𝒢_p(z)`.
pub fn angle_first_variation(
    chart: &FinslerChart,
    z: &Vector2<f64>,
    c_dir: &Vector2<f64>,
    side: Side,
) -> Result<AngleMeasurement> {
    let base = BaseDistance::new(chart, z)?;
    angle_from_directions(chart, z, base.directions(), c_dir, side)
}

/// First-variation angles for a known direction set `𝒢_p(z)`.
pub fn angle_from_directions(
    chart: &FinslerChart,
    z: &Vector2<f64>,
    directions: &[Vector2<f64>],
    c_dir: &Vector2<f64>,
    side: Side,
) -> Result<AngleMeasurement> {
    crate::norms::check_nonzero(c_dir)?;
    if directions.is_empty() {
        return Err(Error::PreconditionFailed("empty direction set".into()));
    }
    let c = c_dir / chart.norm(z, c_dir);
    let lambda = chart.norm(z, &(-c)).max(1.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in directions {
        let g = chart.tensor(z, v)?.inner(v, &c);
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok(AngleMeasurement {
        forward_angle: side.forward().then(|| angle_of(-lo / lambda)),
        backward_angle: side.backward().then(|| angle_of(hi / lambda)),
        lambda,
        method: AngleMethod::FirstVariation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientOptions {
    pub h0: f64,
    pub halvings: usize,
    /// Largest change between the last two extrapolated values that is
    /// still accepted as a limit.
    pub spread: f64,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self {
            h0: 1e-2,
            halvings: 6,
            spread: 1e-3,
        }
    }
}

/// Two levels of Richardson extrapolation for a quotient with an expansion
/// in powers of `h`, evaluated at `h0 / 2^k`.
fn extrapolate(values: &[f64]) -> Vec<f64> {
    let r1: Vec<f64> = values.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect()
}

fn limit(
    mut quotient: impl FnMut(f64) -> Result<f64>,
    h0: f64,
    opts: &QuotientOptions,
) -> Result<(f64, Vec<f64>)> {
    let mut steps = Vec::new();
    let mut values = Vec::new();
    let mut h = h0;
    for k in 0..=opts.halvings {
        values.push(quotient(h)?);
        steps.push(h);
        h *= 0.5;
        let est = extrapolate(&values);
        if k >= 3 {
            let n = est.len();
            if (est[n - 1] - est[n - 2]).abs() < 1e-9 {
                return Ok((est[n - 1], steps));
            }
        }
    }
    let est = extrapolate(&values);
    let n = est.len();
    let spread = (est[n - 1] - est[n - 2]).abs();
    if spread > opts.spread {
        return Err(Error::LimitNotResolved(spread));
    }
    Ok((est[n - 1], steps))
}

/// `d(a, b)` for nearby points, by Newton from the straight chord.
fn short_distance(chart: &FinslerChart, a: &Vector2<f64>, b: &Vector2<f64>) -> Result<f64> {
    let u = solve_velocity(chart, a, b, b - a)?;
    Ok(chart.norm(a, &u))
}

/// Angles at `c(s)` as limits of the distance quotients
/// `−(d(p, c(s+h)) − d(p, c(s))) / d_m(c(s), c(s+h))` (forward) and
/// `(d(p, c(s)) − d(p, c(s−h))) / d_m(c(s−h), c(s))` (backward).
/// `c` must be a unit-speed minimal geodesic, so `d(c(s), c(s+h)) = h`.
pub fn angle_difference_quotient(
    chart: &FinslerChart,
    c: &GeodesicPath,
    s: f64,
    side: Side,
) -> Result<AngleMeasurement> {
    angle_difference_quotient_with(chart, c, s, side, &QuotientOptions::default())
}

pub fn angle_difference_quotient_with(
    chart: &FinslerChart,
    c: &GeodesicPath,
    s: f64,
    side: Side,
    opts: &QuotientOptions,
) -> Result<AngleMeasurement> {
    let a = c.forward_length;
    if side.forward() && !(s >= 0.0 && s < a) {
        return Err(Error::PreconditionFailed(format!(
            "forward angle needs 0 ≤ s < {a}, got {s}"
        )));
    }
    if side.backward() && !(s > 0.0 && s <= a) {
        return Err(Error::PreconditionFailed(format!(
            "backward angle needs 0 < s ≤ {a}, got {s}"
        )));
    }
    let (z, zv) = c.point_at(s);
    let base = BaseDistance::new(chart, &z)?;
    let d0 = base.at(&z)?;
    let lambda = chart.norm(&z, &(-zv / chart.norm(&z, &zv))).max(1.0);
    let mut steps = Vec::new();

    let forward_angle = if side.forward() {
        let quotient = |h: f64| -> Result<f64> {
            let (y, _) = c.point_at(s + h);
            let dm = h.max(short_distance(chart, &y, &z)?);
            Ok(-(base.at(&y)? - d0) / dm)
        };
        let (cos, hs) = limit(quotient, opts.h0.min(0.5 * (a - s)), opts)?;
        steps = hs;
        Some(angle_of(cos))
    } else {
        None
    };
    let backward_angle = if side.backward() {
        let quotient = |h: f64| -> Result<f64> {
            let (y, _) = c.point_at(s - h);
            let dm = h.max(short_distance(chart, &z, &y)?);
            Ok((d0 - base.at(&y)?) / dm)
        };
        let (cos, hs) = limit(quotient, opts.h0.min(0.5 * s), opts)?;
        if steps.is_empty() {
            steps = hs;
        }
        Some(angle_of(cos))
    } else {
        None
    };
    Ok(AngleMeasurement {
        forward_angle,
        backward_angle,
        lambda,
        method: AngleMethod::DifferenceQuotient { steps },
    })
}
