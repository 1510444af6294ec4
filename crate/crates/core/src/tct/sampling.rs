use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::hypotheses::{check_hypotheses, HypothesisOptions, HypothesisReport};
use super::triangle::{forward_triangle, ForwardTriangle};
use super::verify::{verify_tct, TctMode, TctStatus};
use crate::error::{Error, Result};
use crate::manifold::{geodesic_endpoint, BasePoint, FinslerChart};
use crate::model_surface::ModelSurface;

/// Admissible triangles have `x`, `y` at distances in `(ρ + margin, r_max)`
/// from `p`, separated by an angle in `separation` at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSampler {
    pub margin: f64,
    pub r_max: f64,
    pub separation: (f64, f64),
    pub max_attempts: usize,
}

impl TriangleSampler {
    /// Radii up to half the surface's truncation radius.
    pub fn for_surface(surface: &ModelSurface) -> Self {
        Self {
            margin: 0.05,
            r_max: 0.5 * surface.t_max(),
            separation: (0.1, 2.5),
            max_attempts: 50,
        }
    }
}

/// The point at distance `r` from `p` in direction `θ` (a coordinate angle at `p`).
fn radial_point(chart: &FinslerChart, r: f64, theta: f64) -> Result<Vector2<f64>> {
    match chart.base() {
        BasePoint::Pole => Ok(Vector2::new(r, theta)),
        BasePoint::Point(p) => {
            let dir = Vector2::new(theta.cos(), theta.sin());
            Ok(geodesic_endpoint(chart, p, &dir, r)?.0)
        }
    }
}

/// Draws triangles until one passes [`check_hypotheses`].
pub fn admissible_triangle(
    chart: &FinslerChart,
    surface: &ModelSurface,
    sampler: &TriangleSampler,
    hyp: &HypothesisOptions,
    rng: &mut impl Rng,
) -> Result<(ForwardTriangle, HypothesisReport)> {
    let rho = surface
        .rho()
        .ok_or_else(|| Error::PreconditionFailed("model surface has no critical radius".into()))?;
    let r_min = rho + sampler.margin;
    if !(sampler.r_max > r_min) {
        return Err(Error::PreconditionFailed(format!(
            "empty radius range ({r_min}, {})",
            sampler.r_max
        )));
    }
    let mut last = None;
    for _ in 0..sampler.max_attempts {
        let r1 = rng.gen_range(r_min..sampler.r_max);
        let r2 = rng.gen_range(r_min..sampler.r_max);
        let theta = rng.gen_range(0.0..TAU);
        let sep = rng.gen_range(sampler.separation.0..sampler.separation.1);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let attempt = (|| {
            let x = radial_point(chart, r1, theta)?;
            let y = radial_point(chart, r2, theta + sign * sep)?;
            let tri = forward_triangle(chart, &x, &y)?;
            let report = check_hypotheses(chart, &tri, surface, hyp)?;
            if report.pass() {
                Ok((tri, report))
            } else {
                Err(Error::HypothesisFailed(report.failures()))
            }
        })();
        match attempt {
            Ok(found) => return Ok(found),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::PreconditionFailed("no attempts".into())))
}

/// One line of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct TctRow {
    pub seed: u64,
    pub d_px: f64,
    pub d_py: f64,
    pub d_xy: f64,
    pub l_m: f64,
    pub angle_x: f64,
    pub model_angle_x: f64,
    pub angle_y: f64,
    pub model_angle_y: f64,
    pub min_margin: f64,
    pub status: TctStatus,
}

pub const TCT_CSV_HEADER: &str =
    "seed,d_px,d_py,d_xy,L_m,angle_x,model_angle_x,angle_y,model_angle_y,min_margin,status";

impl TctRow {
    fn inconclusive(seed: u64) -> Self {
        Self {
            seed,
            d_px: f64::NAN,
            d_py: f64::NAN,
            d_xy: f64::NAN,
            l_m: f64::NAN,
            angle_x: f64::NAN,
            model_angle_x: f64::NAN,
            angle_y: f64::NAN,
            model_angle_y: f64::NAN,
            min_margin: f64::NAN,
            status: TctStatus::Inconclusive,
        }
    }

    pub fn csv_line(&self) -> String {
        let nums = [
            self.d_px,
            self.d_py,
            self.d_xy,
            self.l_m,
            self.angle_x,
            self.model_angle_x,
            self.angle_y,
            self.model_angle_y,
            self.min_margin,
        ];
        let mut line = self.seed.to_string();
        for v in nums {
            line.push_str(&format!(",{v:.16e}"));
        }
        line.push_str(&format!(",{}", self.status));
        line
    }
}

pub fn write_tct_csv(rows: &[TctRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{TCT_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Samples an admissible triangle from `seed` and verifies it. Failures to
/// find or measure a triangle give an `INCONCLUSIVE` row.
pub fn tct_sample(
    chart: &FinslerChart,
    surface: &ModelSurface,
    mode: TctMode,
    sampler: &TriangleSampler,
    hyp: &HypothesisOptions,
    seed: u64,
) -> TctRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Ok((tri, report)) = admissible_triangle(chart, surface, sampler, hyp, &mut rng) else {
        return TctRow::inconclusive(seed);
    };
    let Ok(v) = verify_tct(&tri, surface, mode, Some(&report), false) else {
        return TctRow::inconclusive(seed);
    };
    TctRow {
        seed,
        d_px: tri.d_px,
        d_py: tri.d_py,
        d_xy: tri.d_xy,
        l_m: tri.l_m,
        angle_x: v.angle_x,
        model_angle_x: v.model_angle_x,
        angle_y: v.angle_y,
        model_angle_y: v.model_angle_y,
        min_margin: v.min_margin,
        status: v.status,
    }
}

/// Rows for seeds `seed, seed + 1, …`, evaluated in parallel and returned in order.
pub fn tct_batch(
    chart: &FinslerChart,
    surface: &ModelSurface,
    mode: TctMode,
    sampler: &TriangleSampler,
    hyp: &HypothesisOptions,
    seed: u64,
    count: usize,
) -> Vec<TctRow> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| tct_sample(chart, surface, mode, sampler, hyp, seed.wrapping_add(k)))
        .collect()
}
