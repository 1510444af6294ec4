//! Index forms along radial geodesics and the comparison fields on the model.

use nalgebra::Vector2;

use super::jacobi::SampledField;
use crate::error::{Error, Result};
use crate::manifold::{nonlinear_connection, riemann_operator, FinslerChart};
use crate::model_surface::ModelSurface;
use crate::quad;

/// Where the quadrature starts when `γ(0)` lies outside the chart (the pole
/// of a polar chart); the piece `[0, a]` is extrapolated.
const POLE_CUTOFF: f64 = 0.005;
const QUAD_TOL: f64 = 1e-10;

/// `I_l(X, Y) = ∫₀ˡ g_γ̇(D_γ̇X, D_γ̇Y) − g_γ̇(R^γ̇(X, γ̇)γ̇, Y) dt` along the
/// geodesic stored in `gamma` (values `γ(t)`, derivatives `γ̇(t)`).
pub fn index_form(
    chart: &FinslerChart,
    gamma: &SampledField,
    x: &SampledField,
    y: &SampledField,
) -> Result<f64> {
    let (t0, l) = (gamma.ts[0], *gamma.ts.last().unwrap());
    let mut err = None;
    let mut integrand = |t: f64| -> f64 {
        match index_density(chart, gamma, x, y, t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let start_inside = chart.contains(&gamma.at(t0).0);
    let value = if start_inside {
        quad::integrate(&mut integrand, t0, l, QUAD_TOL)
    } else {
        let a = POLE_CUTOFF.min((l - t0) / 10.0);
        // quadratic extrapolation of the density to t = t0
        let head = a / 12.0
            * (23.0 * integrand(t0 + a) - 16.0 * integrand(t0 + 2.0 * a)
                + 5.0 * integrand(t0 + 3.0 * a));
        head + quad::integrate(&mut integrand, t0 + a, l, QUAD_TOL)
    };
    match err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

fn index_density(
    chart: &FinslerChart,
    gamma: &SampledField,
    x: &SampledField,
    y: &SampledField,
    t: f64,
) -> Result<f64> {
    let (p, v) = gamma.at(t);
    let (xv, xd) = x.at(t);
    let (yv, yd) = y.at(t);
    let n = nonlinear_connection(chart, &p, &v)?;
    let r = riemann_operator(chart, &p, &v)?;
    let g = chart.tensor(&p, &v)?;
    Ok(g.inner(&(xd + n * xv), &(yd + n * yv)) - g.inner(&(r * xv), &yv))
}

/// The fields `X̃ = (f_δ(t)/f_δ(l)) Ẽ` and `J̃⊥ = λ sin ω · X̃` along the meridian
/// `θ = 0` of the modified model, with their index forms.
#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub l: f64,
    /// `X̃` in polar coordinates: the constant `(0, 1/f_δ(l))`.
    pub x_tilde: SampledField,
    pub j_perp: SampledField,
    /// `Ĩ_l(X̃, X̃)` by quadrature of `(f_δ'² − (G − δ) f_δ²)/f_δ(l)²`.
    pub index_x: f64,
    /// `f_δ'(l)/f_δ(l)`.
    pub index_x_closed: f64,
    /// `Ĩ_l(J̃⊥, J̃⊥) = (λ sin ω)² Ĩ_l(X̃, X̃)`.
    pub index_j_perp: f64,
    /// `δ/f_δ(l)² ∫₀ˡ f_δ²`.
    pub delta_term: f64,
}

/// `surface_delta` is the model with curvature `G − δ`.
pub fn model_comparison_fields(
    surface_delta: &ModelSurface,
    delta: f64,
    l: f64,
    omega: f64,
    lambda: f64,
) -> Result<ModelComparison> {
    let rho = surface_delta
        .rho()
        .ok_or_else(|| Error::PreconditionFailed("model has no critical radius".into()))?;
    if !(l > rho) {
        return Err(Error::PreconditionFailed(format!(
            "need l > ρ_δ = {rho}, got l = {l}"
        )));
    }
    if l > surface_delta.t_max() {
        return Err(Error::TruncationTooShort(format!("l = {l} beyond t_max")));
    }
    let [fl, dfl, _] = surface_delta.derivs(l);
    let ts: Vec<f64> = (0..=64).map(|k| l * k as f64 / 64.0).collect();
    let x_tilde = SampledField::from_fn(ts.clone(), |_| {
        (Vector2::new(0.0, 1.0 / fl), Vector2::zeros())
    });
    let amp = lambda * omega.sin();
    let j_perp = SampledField::from_fn(ts, |_| (Vector2::new(0.0, amp / fl), Vector2::zeros()));
    let density = |t: f64| {
        let [f, df, ddf] = surface_delta.derivs(t);
        // G − δ = −f''/f, so the density is f'² + f f''
        df * df + f * ddf
    };
    let index_x = quad::integrate(density, 0.0, l, 1e-13) / (fl * fl);
    Ok(ModelComparison {
        l,
        x_tilde,
        j_perp,
        index_x,
        index_x_closed: dfl / fl,
        index_j_perp: amp * amp * index_x,
        delta_term: delta / (fl * fl) * surface_delta.integral_f_sq(l),
    })
}
