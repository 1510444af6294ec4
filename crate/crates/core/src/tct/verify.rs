use std::fmt;

use super::hypotheses::HypothesisReport;
use super::triangle::ForwardTriangle;
use crate::error::{Error, Result};
use crate::model_surface::{comparison_triangle, ComparisonTriangle, ModelSurface};

/// Allowed shortfall of a measured angle below its model angle.
pub const ANGLE_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TctMode {
    Exact,
    /// Compare with the model of curvature `G − δ`.
    Weak(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TctStatus {
    Pass,
    Fail,
    NotApplicable,
    Inconclusive,
}

impl fmt::Display for TctStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NotApplicable => "NOT_APPLICABLE",
            Self::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TctReport {
    pub angle_x: f64,
    pub model_angle_x: f64,
    pub angle_y: f64,
    pub model_angle_y: f64,
    /// `min(∠x − ∠x̃, ∠y − ∠ỹ)`; NaN when there is no comparison triangle.
    pub min_margin: f64,
    pub status: TctStatus,
    /// The triangle lies on a geodesic through `p`.
    pub degenerate: bool,
    /// Hypotheses were not checked or failed and the comparison ran anyway.
    pub forced: bool,
    pub comparison: Option<ComparisonTriangle>,
}

/// Compares the measured angles `∠→x`, `∠←y` with those of the comparison
/// triangle with sides `(d(p, x), d(p, y), L_m(c))` on `surface` or its
/// `δ`-modification.
///
/// Without `hypotheses` (or with failing ones and `force`) the result is
/// marked as forced; failing hypotheses without `force` are an error.
pub fn verify_tct(
    triangle: &ForwardTriangle,
    surface: &ModelSurface,
    mode: TctMode,
    hypotheses: Option<&HypothesisReport>,
    force: bool,
) -> Result<TctReport> {
    let forced = match hypotheses {
        Some(h) if h.pass() => false,
        Some(h) if !force => return Err(Error::HypothesisFailed(h.failures())),
        _ => true,
    };
    let model = match mode {
        TctMode::Exact => surface.clone(),
        TctMode::Weak(delta) => surface.delta_modification(delta)?,
    };
    let mut report = TctReport {
        angle_x: triangle.forward_angle_x,
        model_angle_x: f64::NAN,
        angle_y: triangle.backward_angle_y,
        model_angle_y: f64::NAN,
        min_margin: f64::NAN,
        status: TctStatus::NotApplicable,
        degenerate: false,
        forced,
        comparison: None,
    };
    if hypotheses.is_some_and(|h| h.inconclusive()) {
        report.status = TctStatus::Inconclusive;
        return Ok(report);
    }
    let comp = match comparison_triangle(&model, triangle.d_px, triangle.d_py, triangle.l_m) {
        Ok(c) => c,
        Err(Error::NoComparisonTriangle) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.model_angle_x = comp.angle_x;
    report.model_angle_y = comp.angle_y;
    report.min_margin = (report.angle_x - comp.angle_x).min(report.angle_y - comp.angle_y);
    // a triangle inside a geodesic through p satisfies the inequalities trivially
    report.degenerate = comp.delta_theta == 0.0 || comp.delta_theta == std::f64::consts::PI;
    report.status = if report.degenerate || report.min_margin >= -ANGLE_SLACK {
        TctStatus::Pass
    } else {
        TctStatus::Fail
    };
    report.comparison = Some(comp);
    Ok(report)
}
