use std::f64::consts::TAU;

use nalgebra::Vector2;
use rand::Rng;
use rayon::prelude::*;

use ftct_core::manifold::{
    flag_curvature, tangent_curvature, ChartDomain, FinslerChart, MetricField,
};

use super::{csv_line, item_rng, num, unit, Outcome, Status};
use crate::config::ExperimentConfig;

const HEADER: &str = "index,x1,x2,v1,v2,w1,w2,flag_curvature,reference,tangent_curvature,status\n";

struct Row {
    x: Vector2<f64>,
    v: Vector2<f64>,
    w: Vector2<f64>,
    flag: f64,
    reference: f64,
    tangent: f64,
    status: Status,
}

/// Known flag curvature at `x`, if any.
fn reference(metric: &MetricField, x: &Vector2<f64>) -> Option<f64> {
    match metric {
        MetricField::Revolution(s) => Some(s.curvature(x[0])),
        MetricField::Conformal { a } => Some(-2.0 * a * (-a * x.norm_squared()).exp()),
        MetricField::Constant(_) => Some(0.0),
        MetricField::RandersAffine { b_lin, .. } if b_lin.norm() == 0.0 => Some(0.0),
        _ => None,
    }
}

/// Metrics whose tangent curvature vanishes identically.
fn tangent_free(metric: &MetricField) -> bool {
    metric.is_riemannian()
        || matches!(metric, MetricField::Constant(_))
        || matches!(metric, MetricField::RandersAffine { b_lin, .. } if b_lin.norm() == 0.0)
}

fn sample(cfg: &ExperimentConfig, chart: &FinslerChart, k: usize) -> Row {
    let mut rng = item_rng(cfg.seed, k);
    let (x, v, w) = match chart.domain() {
        // radial flags
        ChartDomain::Annulus { t_max, .. } => (
            Vector2::new(rng.gen_range(0.05..t_max - 0.05), rng.gen_range(0.0..TAU)),
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
        ),
        ChartDomain::Box { min, max } => {
            let mid = (min + max) / 2.0;
            let half = (max - min) * 0.4;
            let x = Vector2::new(
                rng.gen_range(mid[0] - half[0]..mid[0] + half[0]),
                rng.gen_range(mid[1] - half[1]..mid[1] + half[1]),
            );
            (x, unit(&mut rng), unit(&mut rng))
        }
    };
    let metric = chart.metric();
    let mut row = Row {
        x,
        v,
        w,
        flag: f64::NAN,
        reference: reference(metric, &x).unwrap_or(f64::NAN),
        tangent: f64::NAN,
        status: Status::Inconclusive,
    };
    let (Ok(flag), Ok(tangent)) = (
        flag_curvature(chart, &x, &v, &w),
        tangent_curvature(chart, &x, &v, &w),
    ) else {
        return row;
    };
    row.flag = flag;
    row.tangent = tangent;
    let tol = &cfg.tolerances;
    let flag_ok = row.reference.is_nan() || (flag - row.reference).abs() <= tol.curvature;
    let tangent_ok = !tangent_free(metric) || tangent.abs() <= tol.tangent;
    row.status = if !flag_ok || !tangent_ok {
        Status::Fail
    } else if row.reference.is_nan() && !tangent_free(metric) {
        Status::NotApplicable
    } else {
        Status::Pass
    };
    row
}

/// Flag and tangent curvature at random points, checked against known values.
pub fn run(cfg: &ExperimentConfig, chart: &FinslerChart) -> Outcome {
    let rows: Vec<Row> = (0..cfg.sample_count)
        .into_par_iter()
        .map(|k| sample(cfg, chart, k))
        .collect();
    let mut out = Outcome {
        csv: HEADER.into(),
        ..Outcome::default()
    };
    for (k, r) in rows.iter().enumerate() {
        let mut fields = vec![k.to_string()];
        fields.extend(
            [
                r.x[0],
                r.x[1],
                r.v[0],
                r.v[1],
                r.w[0],
                r.w[1],
                r.flag,
                r.reference,
                r.tangent,
            ]
            .map(num),
        );
        fields.push(r.status.to_string());
        out.csv.push_str(&csv_line(&fields));
    }
    out.plot_block(
        "flag_curvature reference",
        rows.iter().map(|r| (r.flag, r.reference)),
    );
    out.plot_block(
        "index tangent_curvature",
        rows.iter().enumerate().map(|(k, r)| (k as f64, r.tangent)),
    );
    out.statuses = rows.iter().map(|r| r.status).collect();
    let worst = |f: &dyn Fn(&Row) -> f64| {
        rows.iter()
            .map(f)
            .filter(|x| !x.is_nan())
            .fold(0.0, f64::max)
    };
    out.summary = vec![
        format!("curvature: {} samples on {:?}", rows.len(), chart.metric()),
        format!(
            "max |K - reference| = {}",
            num(worst(&|r| (r.flag - r.reference).abs()))
        ),
        format!(
            "max |tangent curvature| = {}",
            num(worst(&|r| r.tangent.abs()))
        ),
    ];
    out
}
