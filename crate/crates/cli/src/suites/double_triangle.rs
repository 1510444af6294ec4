use rand::Rng;
use rayon::prelude::*;

use ftct_core::model_surface::{
    double_triangle_check, DoubleTriangleReport, ModelSurface, PolarPoint,
};
use ftct_core::{Error, Result};

use super::{csv_line, item_rng, num, Outcome, Status};
use crate::config::ExperimentConfig;

const HEADER: &str = "index,x_t,y_t,y_theta,z_t,z_theta,angle_sum_y,angle_x,angle_q,angle_z,angle_r,theta_z,slack,status\n";

const ATTEMPTS: usize = 50;

/// Vertices `x̃ = (t, 0)`, `ỹ`, `z̃` at radii in `(ρ + 0.05, t_max/2)` whose
/// double triangle satisfies the gluing preconditions, with its report.
pub fn admissible_double_triangle(
    surface: &ModelSurface,
    rng: &mut impl Rng,
) -> Result<([PolarPoint; 3], DoubleTriangleReport)> {
    let r_min = surface.rho().map_or(0.1, |r| r + 0.05);
    let r_max = 0.5 * surface.t_max();
    if !(r_max > r_min) {
        return Err(Error::PreconditionFailed(format!(
            "empty radius range ({r_min}, {r_max})"
        )));
    }
    let mut last = None;
    for _ in 0..ATTEMPTS {
        let x = PolarPoint::new(rng.gen_range(r_min..r_max), 0.0);
        let ty = rng.gen_range(0.1..1.5);
        let y = PolarPoint::new(rng.gen_range(r_min..r_max), ty);
        let z = PolarPoint::new(rng.gen_range(r_min..r_max), ty + rng.gen_range(0.1..1.5));
        match double_triangle_check(surface, x, y, z) {
            Ok(r) => return Ok(([x, y, z], r)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// The gluing inequalities `∠x̃ ≥ ∠q̃`, `∠z̃ ≥ ∠r̃` on random double triangles.
pub fn run(cfg: &ExperimentConfig, surface: &ModelSurface) -> Outcome {
    let rows: Vec<Option<([PolarPoint; 3], DoubleTriangleReport)>> = (0..cfg.sample_count)
        .into_par_iter()
        .map(
            |k| match admissible_double_triangle(surface, &mut item_rng(cfg.seed, k)) {
                Ok(found) => Some(found),
                Err(e) => {
                    log::debug!("double_triangle item {k}: {e}");
                    None
                }
            },
        )
        .collect();

    let mut out = Outcome {
        csv: HEADER.into(),
        ..Outcome::default()
    };
    let tol = cfg.tolerances.double_triangle;
    let mut worst = f64::INFINITY;
    for (k, row) in rows.iter().enumerate() {
        let (values, status) = match row {
            Some(([x, y, z], r)) => {
                let ok = r.slack() >= -tol && r.theta_z_below_pi();
                worst = worst.min(r.slack());
                (
                    [
                        x.t,
                        y.t,
                        y.theta,
                        z.t,
                        z.theta,
                        r.angle_sum_at_y,
                        r.angle_x,
                        r.angle_q,
                        r.angle_z,
                        r.angle_r,
                        r.theta_z,
                        r.slack(),
                    ],
                    if ok { Status::Pass } else { Status::Fail },
                )
            }
            None => ([f64::NAN; 12], Status::Inconclusive),
        };
        let mut fields = vec![k.to_string()];
        fields.extend(values.map(num));
        fields.push(status.to_string());
        out.csv.push_str(&csv_line(&fields));
        out.statuses.push(status);
    }
    out.plot_block(
        "angle_sum_y slack",
        rows.iter()
            .flatten()
            .map(|(_, r)| (r.angle_sum_at_y, r.slack())),
    );
    out.summary = vec![
        format!(
            "double_triangle: {} samples on {:?}",
            rows.len(),
            surface.spec()
        ),
        format!("min slack = {} (tolerance {tol:e})", num(worst)),
    ];
    out
}
