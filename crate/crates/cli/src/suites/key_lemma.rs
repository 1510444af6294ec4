use nalgebra::Vector2;

use ftct_core::manifold::{BasePoint, FinslerChart};
use ftct_core::model_surface::ModelSurface;
use ftct_core::variation::{key_lemma_check, LegConfig};
use ftct_core::Error;

use super::{num, Outcome, Status};
use crate::config::ExperimentConfig;
use crate::error::CliError;

fn leg(cfg: &ExperimentConfig, chart: &FinslerChart) -> Result<LegConfig, CliError> {
    let k = &cfg.key_lemma;
    let (x, c_dir) = match (k.x, k.direction, chart.base(), chart.metric().surface()) {
        (Some(x), Some(d), _, _) => (x, d),
        // leaving the meridian point at distance l with angle ω
        (None, None, BasePoint::Pole, Some(s)) => (
            Vector2::new(k.l, 0.3),
            Vector2::new(k.omega.cos(), k.omega.sin() / s.f(k.l)),
        ),
        _ => {
            return Err(CliError::Incomplete(
                "key_lemma needs `key_lemma.x` and `key_lemma.direction` off polar charts".into(),
            ))
        }
    };
    Ok(LegConfig {
        x,
        c_dir,
        epsilon: k.epsilon,
        l0: None,
    })
}

/// `L(s) ≤ L̃(s)` on the variation grid and the lower bound on `Ĩ − I`.
pub fn run(
    cfg: &ExperimentConfig,
    chart: &FinslerChart,
    model: &ModelSurface,
) -> Result<Outcome, CliError> {
    let k = &cfg.key_lemma;
    let leg = leg(cfg, chart)?;
    let theta_floor = k.theta_floor.unwrap_or(k.omega);
    let mut out = Outcome {
        csv: "s,L,Ltilde,margin\n".into(),
        ..Outcome::default()
    };
    let report = match key_lemma_check(chart, model, k.delta, &leg, theta_floor) {
        Ok(r) => r,
        Err(Error::HypothesisFailed(list)) => {
            out.statuses.push(Status::NotApplicable);
            out.summary
                .push("key_lemma: hypotheses do not hold, nothing to check".into());
            out.summary
                .extend(list.into_iter().map(|h| format!("  {h}")));
            return Ok(out);
        }
        Err(e) => {
            out.statuses.push(Status::Inconclusive);
            out.summary.push(format!("key_lemma: {e}"));
            return Ok(out);
        }
    };
    let mut buf = Vec::new();
    report.write_csv(&mut buf).expect("writing to memory");
    out.csv = String::from_utf8(buf).expect("ascii csv");
    out.plot_block("s L", report.l_table.iter().copied());
    out.plot_block("s Ltilde", report.ltilde_table.iter().copied());

    let tol = &cfg.tolerances;
    let verdict = |ok: bool| if ok { Status::Pass } else { Status::Fail };
    out.statuses = report
        .margins()
        .iter()
        .map(|(_, m)| verdict(*m >= -tol.key_lemma))
        .collect();
    out.statuses
        .push(verdict(report.index_gap_slack >= -tol.index_gap));
    out.summary = vec![
        format!(
            "key_lemma: l = {}, delta = {}, omega = {}, lambda = {}",
            num(report.l),
            report.delta,
            num(report.omega),
            num(report.lambda)
        ),
        format!("C1 = {}, eps' = {}", num(report.c1), num(report.eps_prime)),
        format!(
            "I = {}, model I = {}",
            num(report.i_value),
            num(report.model_i_value)
        ),
        format!(
            "min margin L~ - L = {} (tolerance {:e})",
            num(report.min_margin()),
            tol.key_lemma
        ),
        format!(
            "index gap slack = {} (tolerance {:e})",
            num(report.index_gap_slack),
            tol.index_gap
        ),
        format!(
            "variation formula errors: first {}, second {}",
            num(report.first_variation_error),
            num(report.second_variation_error)
        ),
    ];
    Ok(out)
}
