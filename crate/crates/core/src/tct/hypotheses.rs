use std::f64::consts::TAU;

use nalgebra::Vector2;

use super::triangle::ForwardTriangle;
use crate::error::{Error, Result};
use crate::manifold::{
    flag_curvature, geodesic_residual, minimal_geodesic, tangent_curvature, terminal_directions,
    BasePoint, FinslerChart,
};
use crate::model_surface::ModelSurface;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisOptions {
    /// Radius of the sampled neighbourhood `𝒩(c)`, in forward-speed units of `c`.
    pub tube_radius: f64,
    pub base_points: usize,
    pub directions: usize,
    /// Points sampled along each of `γ` and `σ` for the radial curvature bound.
    pub radial_samples: usize,
    pub convexity_tol: f64,
    pub tangent_tol: f64,
    pub reverse_tol: f64,
    pub radial_tol: f64,
    /// Largest fraction of tube points whose `𝒢_p` could not be computed.
    pub max_excluded: f64,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        Self {
            tube_radius: 0.02,
            base_points: 32,
            directions: 16,
            radial_samples: 16,
            convexity_tol: 1e-6,
            tangent_tol: 1e-6,
            reverse_tol: 1e-6,
            radial_tol: 1e-4,
            max_excluded: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    /// `c` avoids the closed ball `B⁺_ρ(p)`.
    pub outside_ball: bool,
    /// Smallest `d(p, c(s))` over the samples.
    pub min_distance_to_p: f64,
    pub rho: f64,
    /// `min (g_v(w, w) − F(w)²)` over the tube.
    pub uniform_convexity_margin: f64,
    /// `max |g_v(v, v) − F(v)²|`; zero up to rounding for any Finsler metric.
    pub radial_equality_residual: f64,
    pub tangent_curvature_max: f64,
    pub reverse_geodesic_residual: f64,
    /// `min (K(v, w) − G(d(p, z)))` over radial flags.
    pub radial_bound_margin: f64,
    pub tube_points: usize,
    pub excluded: usize,
    pub options: HypothesisOptions,
}

impl HypothesisReport {
    pub fn inconclusive(&self) -> bool {
        self.excluded as f64 > self.options.max_excluded * self.tube_points as f64
    }

    /// Names of the conditions that fail.
    pub fn failures(&self) -> Vec<String> {
        let o = &self.options;
        let mut out = Vec::new();
        if !self.outside_ball {
            out.push(format!(
                "c comes within {} of p (ρ = {})",
                self.min_distance_to_p, self.rho
            ));
        }
        if self.uniform_convexity_margin < -o.convexity_tol {
            out.push(format!(
                "uniform convexity margin {}",
                self.uniform_convexity_margin
            ));
        }
        if self.tangent_curvature_max > o.tangent_tol {
            out.push(format!("tangent curvature {}", self.tangent_curvature_max));
        }
        if self.reverse_geodesic_residual > o.reverse_tol {
            out.push(format!(
                "reverse of c is not geodesic ({})",
                self.reverse_geodesic_residual
            ));
        }
        if self.radial_bound_margin < -o.radial_tol {
            out.push(format!(
                "radial curvature bound margin {}",
                self.radial_bound_margin
            ));
        }
        if self.inconclusive() {
            out.push(format!(
                "{} of {} tube points excluded",
                self.excluded, self.tube_points
            ));
        }
        out
    }

    pub fn pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn min_margin(&self) -> f64 {
        [
            self.min_distance_to_p - self.rho,
            self.uniform_convexity_margin,
            -self.tangent_curvature_max,
            -self.reverse_geodesic_residual,
            self.radial_bound_margin,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// `d(p, z)` and `𝒢_p(z)`.
fn radial_data(chart: &FinslerChart, z: &Vector2<f64>) -> Result<(f64, Vec<Vector2<f64>>)> {
    match chart.base() {
        BasePoint::Pole => {
            chart.check_point(z)?;
            Ok((z[0], vec![Vector2::new(1.0, 0.0)]))
        }
        BasePoint::Point(p) => {
            let sol = minimal_geodesic(chart, p, z)?;
            Ok((sol.distance, terminal_directions(&sol.paths)))
        }
    }
}

struct Margins {
    convexity: f64,
    equality: f64,
    tangent: f64,
    radial: f64,
}

impl Margins {
    fn update(
        &mut self,
        chart: &FinslerChart,
        surface: &ModelSurface,
        z: &Vector2<f64>,
        dist: f64,
        v: &Vector2<f64>,
        ws: &[Vector2<f64>],
        tangent: bool,
    ) -> Result<()> {
        let g = chart.tensor(z, v)?;
        self.equality = self
            .equality
            .max((g.norm_sq(v) - chart.norm(z, v).powi(2)).abs());
        let bound = surface.curvature(dist);
        for w in ws {
            self.convexity = self.convexity.min(g.norm_sq(w) - chart.norm(z, w).powi(2));
            if tangent {
                self.tangent = self.tangent.max(tangent_curvature(chart, z, v, w)?.abs());
            }
            // radial flags transversal to v
            match flag_curvature(chart, z, v, w) {
                Ok(k) => self.radial = self.radial.min(k - bound),
                Err(Error::DegenerateFlag(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

/// Evaluates the hypotheses of the comparison theorem for `triangle` against
/// the model `surface` (whose radial curvature is the lower bound `G`).
pub fn check_hypotheses(
    chart: &FinslerChart,
    triangle: &ForwardTriangle,
    surface: &ModelSurface,
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    let rho = surface
        .rho()
        .ok_or_else(|| Error::PreconditionFailed("model surface has no critical radius".into()))?;
    let ws: Vec<Vector2<f64>> = (0..opts.directions)
        .map(|k| {
            let a = TAU * (k as f64 + 0.25) / opts.directions as f64;
            Vector2::new(a.cos(), a.sin())
        })
        .collect();
    let mut m = Margins {
        convexity: f64::INFINITY,
        equality: 0.0,
        tangent: 0.0,
        radial: f64::INFINITY,
    };

    let c = &triangle.c;
    let n = opts.base_points.max(2);
    let mut min_dist = f64::INFINITY;
    let mut tube_points = 0;
    let mut excluded = 0;
    for k in 0..n {
        let s = c.forward_length * k as f64 / (n - 1) as f64;
        let (center, v) = c.point_at(s);
        let perp = Vector2::new(-v[1], v[0]);
        let perp = perp / chart.norm(&center, &perp);
        for offset in [0.0, opts.tube_radius, -opts.tube_radius] {
            let z = center + perp * offset;
            if !chart.contains(&z) {
                continue;
            }
            tube_points += 1;
            let (dist, dirs) = match radial_data(chart, &z) {
                Ok(d) => d,
                Err(Error::BvpNoConvergence(_)) | Err(Error::IntegrationFailure(_)) => {
                    excluded += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if offset == 0.0 {
                min_dist = min_dist.min(dist);
            }
            for v in &dirs {
                m.update(chart, surface, &z, dist, v, &ws, true)?;
            }
        }
    }

    // radial curvature along γ and σ
    for path in [&triangle.gamma, &triangle.sigma] {
        let len = path.forward_length;
        for k in 1..=opts.radial_samples {
            let s = len * k as f64 / opts.radial_samples as f64;
            if s < 0.05 * len.min(1.0) {
                continue;
            }
            let (z, v) = path.point_at(s);
            if !chart.contains(&z) {
                continue;
            }
            m.update(chart, surface, &z, s, &v, &ws, false)?;
        }
    }

    let reverse = geodesic_residual(chart, &c.reversed())?;
    Ok(HypothesisReport {
        outside_ball: min_dist > rho,
        min_distance_to_p: min_dist,
        rho,
        uniform_convexity_margin: m.convexity,
        radial_equality_residual: m.equality,
        tangent_curvature_max: m.tangent,
        reverse_geodesic_residual: reverse,
        radial_bound_margin: m.radial,
        tube_points,
        excluded,
        options: *opts,
    })
}
