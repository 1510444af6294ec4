use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use rand::Rng;
use rayon::prelude::*;

use ftct_core::angles::{angle_difference_quotient, angle_from_directions, BaseDistance, Side};
use ftct_core::manifold::{geodesic_ivp, BasePoint, ChartDomain, FinslerChart};
use ftct_core::Result;

use super::{csv_line, item_rng, num, unit, Outcome, Status};
use crate::config::ExperimentConfig;

const HEADER: &str = "index,z1,z2,c1,c2,quotient_forward,variation_forward,\
quotient_backward,variation_backward,lambda,directions,status\n";

/// Geodesic piece around each sample point; the angles are taken at its midpoint.
const PIECE: f64 = 0.2;

#[derive(Default)]
struct Row {
    z: Vector2<f64>,
    dir: Vector2<f64>,
    /// forward angle by difference quotient and by first variation, then the same for the backward angle
    angles: [f64; 4],
    lambda: f64,
    directions: usize,
}

fn start_point(chart: &FinslerChart, rng: &mut impl Rng) -> Vector2<f64> {
    match (chart.domain(), chart.base()) {
        (ChartDomain::Annulus { t_max, .. }, _) => Vector2::new(
            rng.gen_range(0.3..(t_max - 0.5).max(0.4)),
            rng.gen_range(0.0..TAU),
        ),
        (ChartDomain::Box { min, max }, base) => {
            let p = match base {
                BasePoint::Point(p) => *p,
                BasePoint::Pole => (min + max) / 2.0,
            };
            let half = (max - min).min() * 0.3;
            loop {
                let z = p + Vector2::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
                if (z - p).norm() > 0.3 * half.min(1.0) {
                    return z;
                }
            }
        }
    }
}

fn measure(chart: &FinslerChart, start: &Vector2<f64>, dir: &Vector2<f64>) -> Result<Row> {
    let path = geodesic_ivp(chart, start, dir, PIECE)?;
    let (z, zv) = path.point_at(PIECE / 2.0);
    let dq = angle_difference_quotient(chart, &path, PIECE / 2.0, Side::Both)?;
    let base = BaseDistance::new(chart, &z)?;
    let fv = angle_from_directions(chart, &z, base.directions(), &zv, Side::Both)?;
    Ok(Row {
        z,
        dir: zv,
        angles: [
            dq.forward_angle.unwrap(),
            fv.forward_angle.unwrap(),
            dq.backward_angle.unwrap(),
            fv.backward_angle.unwrap(),
        ],
        lambda: fv.lambda,
        directions: base.directions().len(),
    })
}

fn status(cfg: &ExperimentConfig, r: &Row) -> Status {
    let tol = &cfg.tolerances;
    let [qf, vf, qb, vb] = r.angles;
    let agree = (qf - vf).abs() <= tol.angle && (qb - vb).abs() <= tol.angle;
    let sum = r.directions != 1 || (vf + vb - PI).abs() <= tol.angle_sum;
    if agree && sum {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Difference-quotient angles against first-variation angles at random
/// points of random geodesics.
pub fn run(cfg: &ExperimentConfig, chart: &FinslerChart) -> Outcome {
    let rows: Vec<(Row, Status)> = (0..cfg.sample_count)
        .into_par_iter()
        .map(|k| {
            let mut rng = item_rng(cfg.seed, k);
            let start = start_point(chart, &mut rng);
            let dir = unit(&mut rng);
            match measure(chart, &start, &dir) {
                Ok(r) => {
                    let s = status(cfg, &r);
                    (r, s)
                }
                Err(e) => {
                    log::debug!("angles item {k}: {e}");
                    let r = Row {
                        z: start,
                        dir,
                        angles: [f64::NAN; 4],
                        lambda: f64::NAN,
                        ..Row::default()
                    };
                    (r, Status::Inconclusive)
                }
            }
        })
        .collect();

    let mut out = Outcome {
        csv: HEADER.into(),
        ..Outcome::default()
    };
    for (k, (r, s)) in rows.iter().enumerate() {
        let mut fields = vec![k.to_string()];
        fields.extend([r.z[0], r.z[1], r.dir[0], r.dir[1]].map(num));
        fields.extend(r.angles.map(num));
        fields.extend([num(r.lambda), r.directions.to_string(), s.to_string()]);
        out.csv.push_str(&csv_line(&fields));
    }
    out.plot_block(
        "quotient_forward variation_forward",
        rows.iter().map(|(r, _)| (r.angles[0], r.angles[1])),
    );
    out.plot_block(
        "quotient_backward variation_backward",
        rows.iter().map(|(r, _)| (r.angles[2], r.angles[3])),
    );
    out.statuses = rows.iter().map(|(_, s)| *s).collect();
    let worst = rows
        .iter()
        .filter(|(_, s)| *s != Status::Inconclusive)
        .map(|(r, _)| {
            (r.angles[0] - r.angles[1])
                .abs()
                .max((r.angles[2] - r.angles[3]).abs())
        })
        .fold(0.0, f64::max);
    out.summary = vec![
        format!("angles: {} samples on {:?}", rows.len(), chart.metric()),
        format!(
            "max method disagreement = {} (tolerance {:e})",
            num(worst),
            cfg.tolerances.angle
        ),
    ];
    out
}
