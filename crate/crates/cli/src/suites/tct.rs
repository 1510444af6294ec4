use ftct_core::manifold::{ChartDomain, FinslerChart};
use ftct_core::model_surface::ModelSurface;
use ftct_core::tct::{
    tct_batch, write_tct_csv, HypothesisOptions, TctMode, TriangleSampler, ANGLE_SLACK,
};

use super::{num, Outcome};
use crate::config::ExperimentConfig;

/// Default sampler: radii up to half the smaller of the two truncation radii.
fn sampler(cfg: &ExperimentConfig, chart: &FinslerChart, model: &ModelSurface) -> TriangleSampler {
    let mut s = TriangleSampler::for_surface(model);
    if let ChartDomain::Annulus { t_max, .. } = chart.domain() {
        s.r_max = s.r_max.min(0.5 * t_max);
    }
    if let Some(r) = cfg.tct.r_max {
        s.r_max = r;
    }
    if let Some(m) = cfg.tct.margin {
        s.margin = m;
    }
    s
}

/// Samples admissible triangles and compares their angles with the model.
pub fn run(cfg: &ExperimentConfig, chart: &FinslerChart, model: &ModelSurface) -> Outcome {
    let tol = &cfg.tolerances;
    let hyp = HypothesisOptions {
        convexity_tol: tol.convexity,
        tangent_tol: tol.tangent,
        reverse_tol: tol.reverse,
        radial_tol: tol.radial,
        ..HypothesisOptions::default()
    };
    let sampler = sampler(cfg, chart, model);
    let rows = tct_batch(
        chart,
        model,
        cfg.tct.mode,
        &sampler,
        &hyp,
        cfg.seed,
        cfg.sample_count,
    );

    let mut buf = Vec::new();
    write_tct_csv(&rows, &mut buf).expect("writing to memory");
    let mut out = Outcome {
        csv: String::from_utf8(buf).expect("ascii csv"),
        statuses: rows.iter().map(|r| r.status).collect(),
        ..Outcome::default()
    };
    out.plot_block(
        "seed min_margin",
        rows.iter().map(|r| (r.seed as f64, r.min_margin)),
    );
    let mode = match cfg.tct.mode {
        TctMode::Exact => "exact".to_string(),
        TctMode::Weak(d) => format!("weak (delta = {d})"),
    };
    let worst = rows
        .iter()
        .map(|r| r.min_margin)
        .filter(|m| !m.is_nan())
        .fold(f64::INFINITY, f64::min);
    out.summary = vec![
        format!(
            "tct: {} triangles, {mode} mode, model {:?}",
            rows.len(),
            model.spec()
        ),
        format!(
            "radii in ({}, {}), separation {:?}",
            num(model.rho().unwrap_or(0.0) + sampler.margin),
            num(sampler.r_max),
            sampler.separation
        ),
        format!("min angle margin = {} (slack {ANGLE_SLACK:e})", num(worst)),
    ];
    out
}
