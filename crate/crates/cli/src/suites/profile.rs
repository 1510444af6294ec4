use ftct_core::model_surface::{ClosedForm, ModelSurface, ProfileSpec};

use super::{csv_line, num, Outcome, Status};
use crate::config::ExperimentConfig;

/// `lim_{t↓0} −f''/f` by Richardson extrapolation in `t²`.
pub fn curvature_at_pole(surface: &ModelSurface) -> f64 {
    let g = |t: f64| {
        let [f, _, ddf] = surface.derivs(t);
        -ddf / f
    };
    let h = 0.02;
    let (a, b, c) = (g(h), g(h / 2.0), g(h / 4.0));
    let (ab, bc) = ((4.0 * b - a) / 3.0, (4.0 * c - b) / 3.0);
    (16.0 * bc - ab) / 15.0
}

fn exact_pole_curvature(spec: &ProfileSpec) -> f64 {
    match spec {
        ProfileSpec::ClosedForm(ClosedForm::Plane) => 0.0,
        ProfileSpec::ClosedForm(ClosedForm::Hyperbolic) => -1.0,
        ProfileSpec::ClosedForm(ClosedForm::GaussTanh) => 8.0,
        ProfileSpec::Curvature(c) => c.eval(0.0),
    }
}

/// The `(t, f, G)` table on `sample_count` equally spaced radii in `(0, t_max]`.
pub fn run(cfg: &ExperimentConfig, surface: &ModelSurface) -> Outcome {
    let n = cfg.sample_count;
    let tol = &cfg.tolerances;
    let rows: Vec<(f64, f64, f64)> = (1..=n)
        .map(|k| {
            let t = surface.t_max() * k as f64 / n as f64;
            (t, surface.f(t), surface.curvature(t))
        })
        .collect();

    let mut out = Outcome {
        csv: "t,f,G\n".into(),
        ..Outcome::default()
    };
    for &(t, f, g) in &rows {
        out.csv.push_str(&csv_line(&[num(t), num(f), num(g)]));
    }
    out.plot_block("t f", rows.iter().map(|r| (r.0, r.1)));
    out.plot_block("t G", rows.iter().map(|r| (r.0, r.2)));

    let residual = surface.residual();
    let g0 = curvature_at_pole(surface);
    let exact = exact_pole_curvature(surface.spec());
    let monotone = rows.windows(2).all(|w| w[1].2 <= w[0].2);
    let status = |ok: bool| if ok { Status::Pass } else { Status::Fail };
    out.statuses = vec![
        status(residual <= tol.profile),
        status((g0 - exact).abs() <= tol.g0),
    ];
    out.summary = vec![
        format!("profile: {:?} on (0, {}]", surface.spec(), surface.t_max()),
        format!(
            "ODE residual {} (tolerance {:e}): {}",
            num(residual),
            tol.profile,
            out.statuses[0]
        ),
        format!(
            "G(0+) = {} (exact {exact}, tolerance {:e}): {}",
            num(g0),
            tol.g0,
            out.statuses[1]
        ),
        match surface.rho() {
            Some(rho) => format!("rho = {}", num(rho)),
            None => "rho: none (f' > 0 on the whole range)".into(),
        },
        format!(
            "G non-increasing on the grid: {}",
            if monotone { "yes" } else { "no" }
        ),
    ];
    out
}
