//! One runner per suite. Runners return the CSV, the plot data and the
//! summary as strings; files are written by the caller.

mod angles;
mod curvature;
mod double_triangle;
mod key_lemma;
mod profile;
mod tct;

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use double_triangle::admissible_double_triangle;
use ftct_core::manifold::{BasePoint, ChartDomain, FinslerChart, MetricField, POLAR_INNER_RADIUS};
use ftct_core::model_surface::{build_profile, ModelSurface};
pub use ftct_core::tct::TctStatus as Status;
pub use profile::curvature_at_pole;

use crate::config::{ExperimentConfig, ManifoldConfig, Suite, SurfaceConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub csv: String,
    /// Gnuplot data: two-column blocks separated by two blank lines.
    pub plot: String,
    pub summary: Vec<String>,
    pub statuses: Vec<Status>,
}

impl Outcome {
    /// True when nothing failed or was left undecided.
    pub fn passed(&self) -> bool {
        self.statuses
            .iter()
            .all(|s| matches!(s, Status::Pass | Status::NotApplicable))
    }

    pub fn count(&self, status: Status) -> usize {
        self.statuses.iter().filter(|s| **s == status).count()
    }

    fn plot_block(&mut self, title: &str, rows: impl IntoIterator<Item = (f64, f64)>) {
        if !self.plot.is_empty() {
            self.plot.push_str("\n\n");
        }
        self.plot.push_str(&format!("# {title}\n"));
        for (a, b) in rows {
            self.plot.push_str(&format!("{} {}\n", num(a), num(b)));
        }
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// Generator for item `k` of a run seeded with `seed`.
pub fn item_rng(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64))
}

/// A uniformly distributed unit vector.
pub fn unit(rng: &mut impl Rng) -> Vector2<f64> {
    let a: f64 = rng.gen_range(0.0..TAU);
    Vector2::new(a.cos(), a.sin())
}

pub fn build_surface(s: &SurfaceConfig) -> Result<ModelSurface, CliError> {
    Ok(build_profile(s.spec.clone(), s.t_max)?)
}

pub fn build_chart(cfg: &ExperimentConfig, model: &ModelSurface) -> Result<FinslerChart, CliError> {
    let boxed = |metric: MetricField, radius: f64, base: Vector2<f64>| {
        FinslerChart::new(
            metric,
            ChartDomain::Box {
                min: Vector2::new(-radius, -radius),
                max: Vector2::new(radius, radius),
            },
            BasePoint::Point(base),
        )
    };
    Ok(match &cfg.manifold {
        ManifoldConfig::Model => FinslerChart::polar(model.clone()),
        ManifoldConfig::Revolution(s) => FinslerChart::polar(build_surface(s)?),
        ManifoldConfig::PerturbedRevolution { surface, eps } => FinslerChart::new(
            MetricField::RevolutionPerturbed {
                surface: Arc::new(build_surface(surface)?),
                eps: *eps,
            },
            ChartDomain::Annulus {
                t_min: POLAR_INNER_RADIUS,
                t_max: surface.t_max,
            },
            BasePoint::Pole,
        )?,
        ManifoldConfig::Randers {
            a,
            b,
            b_lin,
            radius,
            base,
        } => boxed(MetricField::randers_affine(*a, *b, *b_lin)?, *radius, *base)?,
        ManifoldConfig::Conformal { a, radius, base } => {
            boxed(MetricField::Conformal { a: *a }, *radius, *base)?
        }
    })
}

pub fn run_suite(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let model = build_surface(&cfg.model)?;
    match cfg.suite {
        Suite::Profile => Ok(profile::run(cfg, &model)),
        Suite::Curvature => Ok(curvature::run(cfg, &build_chart(cfg, &model)?)),
        Suite::Angles => Ok(angles::run(cfg, &build_chart(cfg, &model)?)),
        Suite::KeyLemma => key_lemma::run(cfg, &build_chart(cfg, &model)?, &model),
        Suite::DoubleTriangle => Ok(double_triangle::run(cfg, &model)),
        Suite::Tct => Ok(tct::run(cfg, &build_chart(cfg, &model)?, &model)),
    }
}
