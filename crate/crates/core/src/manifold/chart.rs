//! Coordinate charts carrying a Finsler metric and a base point.

use std::sync::Arc;

use nalgebra::Vector2;

use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::model_surface::ModelSurface;
use crate::norms::{FundamentalTensor, MinkowskiNorm};

/// Innermost radius of polar charts; the pole itself is not a chart point.
pub const POLAR_INNER_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartDomain {
    /// Open box `min < x < max`.
    Box {
        min: Vector2<f64>,
        max: Vector2<f64>,
    },
    /// Polar coordinates `(t, θ)` with `t_min < t < t_max` and any `θ`.
    Annulus { t_min: f64, t_max: f64 },
}

impl ChartDomain {
    pub fn contains(&self, x: &Vector2<f64>) -> bool {
        match self {
            Self::Box { min, max } => {
                x[0] > min[0] && x[0] < max[0] && x[1] > min[1] && x[1] < max[1]
            }
            Self::Annulus { t_min, t_max } => x[0] > *t_min && x[0] <= *t_max && x[1].is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Point(Vector2<f64>),
    /// The pole `t = 0` of a polar chart.
    Pole,
}

/// A Finsler metric on a single coordinate chart with a distinguished base point `p`.
#[derive(Debug, Clone)]
pub struct FinslerChart {
    metric: Arc<MetricField>,
    domain: ChartDomain,
    base: BasePoint,
}

impl FinslerChart {
    /// Validates the metric on a sample grid of the domain.
    pub fn new(metric: MetricField, domain: ChartDomain, base: BasePoint) -> Result<Self> {
        match (&base, metric.is_polar()) {
            (BasePoint::Pole, false) => {
                return Err(Error::PreconditionFailed(
                    "a pole needs a polar metric".into(),
                ))
            }
            (BasePoint::Point(p), _) if !domain.contains(p) => {
                return Err(Error::PreconditionFailed(format!(
                    "base point {p:?} outside the chart"
                )))
            }
            _ => {}
        }
        let chart = Self {
            metric: Arc::new(metric),
            domain,
            base,
        };
        chart.validate()?;
        Ok(chart)
    }

    /// The polar chart of a surface of revolution, based at its pole.
    pub fn polar(surface: ModelSurface) -> Self {
        let t_max = surface.t_max();
        Self {
            metric: Arc::new(MetricField::revolution(surface)),
            domain: ChartDomain::Annulus {
                t_min: POLAR_INNER_RADIUS,
                t_max,
            },
            base: BasePoint::Pole,
        }
    }

    /// A box chart `(−r, r)²` of a constant norm, based at the origin.
    pub fn minkowski(norm: MinkowskiNorm, r: f64) -> Self {
        Self {
            metric: Arc::new(MetricField::Constant(norm)),
            domain: ChartDomain::Box {
                min: Vector2::new(-r, -r),
                max: Vector2::new(r, r),
            },
            base: BasePoint::Point(Vector2::zeros()),
        }
    }

    fn validate(&self) -> Result<()> {
        let pts: Vec<Vector2<f64>> = match self.domain {
            ChartDomain::Box { min, max } => (1..8)
                .flat_map(|i| {
                    (1..8).map(move |j| {
                        Vector2::new(
                            min[0] + (max[0] - min[0]) * i as f64 / 8.0,
                            min[1] + (max[1] - min[1]) * j as f64 / 8.0,
                        )
                    })
                })
                .collect(),
            ChartDomain::Annulus { t_min, t_max } => (1..=8)
                .map(|i| Vector2::new(t_min + (t_max - t_min) * i as f64 / 8.0, 0.0))
                .collect(),
        };
        for x in pts {
            for k in 0..12 {
                let a = std::f64::consts::PI * k as f64 / 6.0;
                let v = Vector2::new(a.cos(), a.sin());
                if !(self.metric.value(&x, &v) > 0.0) {
                    return Err(Error::InvalidNorm(format!(
                        "F({x:?}, {v:?}) is not positive"
                    )));
                }
                self.metric.fundamental_tensor(&x, &v)?;
            }
        }
        Ok(())
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn base(&self) -> &BasePoint {
        &self.base
    }

    pub fn is_reversible(&self) -> bool {
        self.metric.is_reversible()
    }

    pub fn contains(&self, x: &Vector2<f64>) -> bool {
        self.domain.contains(x)
    }

    /// `F(x, v)`.
    pub fn norm(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> f64 {
        self.metric.value(x, v)
    }

    /// `g_v` at `x`.
    pub fn tensor(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> Result<FundamentalTensor> {
        self.metric.fundamental_tensor(x, v)
    }

    /// The Minkowski norm on `T_xM`.
    pub fn norm_at(&self, x: &Vector2<f64>) -> MinkowskiNorm {
        self.metric.norm_at(*x)
    }

    pub fn spray(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> Result<Vector2<f64>> {
        self.metric.spray(x, v)
    }

    /// Distance from the base point when it is known in closed form
    /// (the pole of a polar chart, where `d(p, (t, θ)) = t`).
    pub fn closed_form_base_distance(&self, z: &Vector2<f64>) -> Option<f64> {
        match self.base {
            BasePoint::Pole => Some(z[0]),
            BasePoint::Point(_) => None,
        }
    }

    pub(crate) fn check_point(&self, x: &Vector2<f64>) -> Result<()> {
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(Error::InvalidVector(format!("non-finite point {x:?}")));
        }
        if !self.contains(x) {
            return Err(Error::ChartExit(x[0], x[1]));
        }
        Ok(())
    }
}
