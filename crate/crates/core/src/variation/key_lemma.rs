//! The local comparison `L(s) ≤ L̃(s)` between the distance from the base
//! point along a geodesic `c` through `x` and its counterpart on the
//! `δ`-modified model, with the index-form inequalities behind it.

use std::io::Write;

use nalgebra::Vector2;

use super::index::{model_comparison_fields, ModelComparison};
use super::jacobi::{jacobi_field, SampledField};
use crate::angles::BaseDistance;
use crate::error::{Error, Result};
use crate::manifold::{flow, tangent_curvature, FinslerChart};
use crate::model_surface::ModelSurface;
use crate::ode::Solution;

/// The geodesic `c` through `x = c(0)` with `ċ(0) ∝ c_dir`, varied over `s ∈ [−ε, ε]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegConfig {
    pub x: Vector2<f64>,
    pub c_dir: Vector2<f64>,
    pub epsilon: f64,
    /// `l₀ = d(p, q)` entering `C₁`; `None` uses `l = d(p, x)`.
    pub l0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyLemmaOptions {
    pub grid_points: usize,
    /// Allowed `|𝒯(γ̇(l), ċ(0))|`, relative to `g_{γ̇(l)}(ċ(0), ċ(0))`.
    pub tangent_tol: f64,
    pub convexity_tol: f64,
    /// Allowed excess of `L` over `L̃` on the grid.
    pub comparison_slack: f64,
}

impl Default for KeyLemmaOptions {
    fn default() -> Self {
        Self {
            grid_points: 41,
            tangent_tol: 1e-6,
            convexity_tol: 1e-6,
            comparison_slack: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationReport {
    pub l: f64,
    pub delta: f64,
    pub omega: f64,
    pub lambda: f64,
    pub j_samples: SampledField,
    pub j_perp_samples: SampledField,
    /// `I_l(J⊥, J⊥)`
    pub i_value: f64,
    /// `Ĩ_l(J̃⊥, J̃⊥)`
    pub model_i_value: f64,
    pub model: ModelComparison,
    pub tangent_curvature: f64,
    pub c1: f64,
    pub c2_est: f64,
    pub c3_est: f64,
    pub eps_prime: f64,
    pub l_table: Vec<(f64, f64)>,
    pub ltilde_table: Vec<(f64, f64)>,
    /// `Ĩ(X̃, X̃) − I(X, X) − δ/f_δ(l)² ∫f_δ²` for the normalised `X = J⊥/|J⊥(l)|`.
    pub index_lemma_slack: f64,
    /// `Ĩ(J̃⊥, J̃⊥) − I(J⊥, J⊥) − δ C₁ sin²ω`.
    pub index_gap_slack: f64,
    /// `|L'(0) − g_{γ̇(l)}(γ̇(l), ċ(0))|` from finite differences of `L`.
    pub first_variation_error: f64,
    /// `|L''(0) − (I(J⊥, J⊥) − 𝒯)|` from finite differences of `L`.
    pub second_variation_error: f64,
    /// Largest deviation of `g_γ̇(γ̇, J)` from linear growth.
    pub linear_growth_residual: f64,
}

impl VariationReport {
    /// `L̃(s) − L(s)` on the grid.
    pub fn margins(&self) -> Vec<(f64, f64)> {
        self.l_table
            .iter()
            .zip(&self.ltilde_table)
            .map(|((s, a), (_, b))| (*s, b - a))
            .collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.margins()
            .iter()
            .map(|m| m.1)
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `s, L, Ltilde, margin`.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "s,L,Ltilde,margin")?;
        for ((s, a), (_, b)) in self.l_table.iter().zip(&self.ltilde_table) {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s, a, b, b - a)?;
        }
        Ok(())
    }
}

/// A geodesic through `x` integrated both ways over `[−ε, ε]`.
struct TwoSided {
    forward: Solution<4>,
    backward: Solution<4>,
}

impl TwoSided {
    fn new(chart: &FinslerChart, x: &Vector2<f64>, v: &Vector2<f64>, eps: f64) -> Result<Self> {
        Ok(Self {
            forward: flow(chart, x, v, eps, eps / 64.0)?,
            backward: flow(chart, x, v, -eps, eps / 64.0)?,
        })
    }

    fn at(&self, s: f64) -> Vector2<f64> {
        let y = if s >= 0.0 {
            self.forward.at(s)
        } else {
            self.backward.at(s)
        };
        Vector2::new(y[0], y[1])
    }
}

/// `L(s)` and `L̃(s)` with the second-order data at `s = 0`.
struct Expansion {
    l: f64,
    slope: f64,
    curvature: f64,
    model_curvature: f64,
}

impl Expansion {
    fn remainder(&self, s: f64, value: f64, model: bool) -> f64 {
        let k = if model {
            self.model_curvature
        } else {
            self.curvature
        };
        value - (self.l + s * self.slope + 0.5 * s * s * k)
    }
}

/// Checks `L(s) ≤ L̃(s)` near `s = 0`. `ċ(0)` is `leg.c_dir` rescaled to unit
/// forward speed, `λ = max{1, F(−ċ(0))}` and `λ cos ω = g_{γ̇(l)}(γ̇(l), ċ(0))`.
/// `surface` is the reference model; the comparison runs on its `δ`-modification.
pub fn key_lemma_check(
    chart: &FinslerChart,
    surface: &ModelSurface,
    delta: f64,
    leg: &LegConfig,
    theta_floor: f64,
) -> Result<VariationReport> {
    key_lemma_check_with(
        chart,
        surface,
        delta,
        leg,
        theta_floor,
        &KeyLemmaOptions::default(),
    )
}

pub fn key_lemma_check_with(
    chart: &FinslerChart,
    surface: &ModelSurface,
    delta: f64,
    leg: &LegConfig,
    theta_floor: f64,
    opts: &KeyLemmaOptions,
) -> Result<VariationReport> {
    if !(leg.epsilon > 0.0) || opts.grid_points < 2 {
        return Err(Error::PreconditionFailed(
            "need ε > 0 and at least two grid points".into(),
        ));
    }
    crate::norms::check_nonzero(&leg.c_dir)?;
    let x = leg.x;
    let c = leg.c_dir / chart.norm(&x, &leg.c_dir);
    let lambda = chart.norm(&x, &(-c)).max(1.0);
    let base = BaseDistance::new(chart, &x)?;
    let surface_delta = surface.delta_modification(delta)?;

    let j = jacobi_field(chart, &x, &c)?;
    let l = j.l;
    let (_, gl) = j.gamma.end();
    let g_end = chart.tensor(&x, &gl)?;
    let slope = g_end.inner(&gl, &c);
    let omega = (slope / lambda).clamp(-1.0, 1.0).acos();
    let tc = tangent_curvature(chart, &x, &gl, &c)?;

    let mut failed = Vec::new();
    if base.directions().len() != 1 {
        failed.push(format!(
            "{} minimal geodesics reach x",
            base.directions().len()
        ));
    }
    match surface_delta.rho() {
        Some(r) if l > r => {}
        r => failed.push(format!("l = {l} is not beyond ρ_δ = {r:?}")),
    }
    let worst = (0..64)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 64.0;
            let w = Vector2::new(a.cos(), a.sin());
            g_end.norm_sq(&w) - chart.norm(&x, &w).powi(2)
        })
        .fold(f64::INFINITY, f64::min);
    if worst < -opts.convexity_tol {
        failed.push(format!("g_γ̇(l)(w, w) ≥ F(w)² fails by {}", -worst));
    }
    if tc.abs() > opts.tangent_tol * g_end.norm_sq(&c) {
        failed.push(format!("tangent curvature {tc} is not zero"));
    }
    if omega.sin() < theta_floor.sin() - 1e-12 {
        failed.push(format!(
            "sin ω = {} below sin θ = {}",
            omega.sin(),
            theta_floor.sin()
        ));
    }
    if !failed.is_empty() {
        return Err(Error::HypothesisFailed(failed));
    }

    let jp = j.orthogonal_component(chart, &c)?;
    let i_value = jp.index_by_boundary(chart)?;
    let model = model_comparison_fields(&surface_delta, delta, l, omega, lambda)?;
    let (jl, _) = jp.field.end();
    let norm_sq = g_end.norm_sq(&jl);
    let index_lemma_slack = model.index_x - i_value / norm_sq - model.delta_term;

    let l0 = leg.l0.unwrap_or(l);
    let c1 = surface.integral_f_sq(l0) / (2.0 * surface.f(l0).powi(2));
    let index_gap_slack = model.index_j_perp - i_value - delta * c1 * omega.sin().powi(2);

    // the curves c and c̃ and the distances along them
    let eps = leg.epsilon;
    let curve = TwoSided::new(chart, &x, &c, eps)?;
    let model_chart = FinslerChart::polar(surface_delta.clone());
    let fl = surface_delta.f(l);
    let model_dir = Vector2::new(omega.cos(), omega.sin() / fl) * lambda;
    let model_curve = TwoSided::new(&model_chart, &Vector2::new(l, 0.0), &model_dir, eps)?;
    let dist = |s: f64| base.at(&curve.at(s));
    let model_dist = |s: f64| model_curve.at(s)[0];

    let exp = Expansion {
        l,
        slope,
        curvature: i_value,
        model_curvature: model.index_j_perp,
    };
    let mut c2: f64 = 0.0;
    let mut c3: f64 = 0.0;
    for k in 1..=20 {
        for sign in [-1.0, 1.0] {
            let s = sign * eps * k as f64 / 20.0;
            let cube = s.abs().powi(3);
            c2 = c2.max(exp.remainder(s, dist(s)?, false).abs() / cube);
            c3 = c3.max(exp.remainder(s, model_dist(s), true).abs() / cube);
        }
    }
    let sin_floor = theta_floor.sin();
    let eps_prime = if c2 + c3 > 0.0 {
        eps.min(delta * c1 * sin_floor * sin_floor / (2.0 * (c2 + c3)))
    } else {
        eps
    };

    let n = opts.grid_points;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            if 2 * k + 1 == n {
                0.0
            } else {
                -eps_prime + 2.0 * eps_prime * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    let mut l_table = Vec::with_capacity(n);
    let mut ltilde_table = Vec::with_capacity(n);
    for &s in &grid {
        l_table.push((s, if s == 0.0 { l } else { dist(s)? }));
        ltilde_table.push((s, if s == 0.0 { l } else { model_dist(s) }));
    }

    // finite differences of L at s = 0, one Richardson step
    let h = (1e-2f64).min(0.5 * eps);
    let d0 = dist(0.0)?;
    let diffs = |h: f64| -> Result<(f64, f64)> {
        let (p, m) = (dist(h)?, dist(-h)?);
        Ok(((p - m) / (2.0 * h), (p - 2.0 * d0 + m) / (h * h)))
    };
    let (a1, a2) = diffs(h)?;
    let (b1, b2) = diffs(0.5 * h)?;
    let first = (4.0 * b1 - a1) / 3.0;
    let second = (4.0 * b2 - a2) / 3.0;

    Ok(VariationReport {
        l,
        delta,
        omega,
        lambda,
        linear_growth_residual: j.linear_growth_residual(chart, &c)?,
        j_samples: j.field,
        j_perp_samples: jp.field,
        i_value,
        model_i_value: model.index_j_perp,
        model,
        tangent_curvature: tc,
        c1,
        c2_est: c2,
        c3_est: c3,
        eps_prime,
        l_table,
        ltilde_table,
        index_lemma_slack,
        index_gap_slack,
        first_variation_error: (first - slope).abs(),
        second_variation_error: (second - (i_value - tc)).abs(),
    })
}
