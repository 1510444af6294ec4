//! Cut locus of a point on a von Mangoldt surface.
//!
//! The cut locus of `x̃ = (t₀, θ₀)` is either empty or the part of the opposite
//! meridian beyond the first conjugate point of `x̃` along the geodesic through
//! the pole. That conjugate point is the first zero of the normal Jacobi field
//! `j'' + G(|t₀ − s|) j = 0`, `j(0) = 0`, `j'(0) = 1`.

use super::ModelSurface;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutLocus {
    Empty,
    /// Points `(t, θ₀ + π)` with `t ≥ t_cut`.
    Ray {
        theta: f64,
        t_cut: f64,
    },
}

pub fn cut_locus_ray(surface: &ModelSurface, t0: f64, theta0: f64) -> Result<CutLocus> {
    if !(t0 > 0.0 && t0 < surface.t_max()) {
        return Err(Error::PreconditionFailed(format!(
            "t0 = {t0} must lie in (0, {})",
            surface.t_max()
        )));
    }
    let s_end = t0 + surface.t_max();
    let s_start = 1e-8;
    let mut rhs = |s: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        Ok([y[1], -surface.curvature((t0 - s).abs()) * y[0]])
    };
    let mut event = |_s: f64, y: &[f64; 2]| y[0];
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-15,
        max_step: 0.01,
        max_steps: 1_000_000,
    };
    let sol = ode::integrate(
        &mut rhs,
        s_start,
        [s_start, 1.0],
        s_end,
        &opts,
        Some(&mut event),
        None,
    )?;
    let theta = theta0 + std::f64::consts::PI;
    if sol.termination == Termination::Event {
        let s_star = sol.t_end();
        if s_star <= t0 {
            return Err(Error::PreconditionFailed(format!(
                "conjugate point at arclength {s_star} before reaching the pole"
            )));
        }
        return Ok(CutLocus::Ray {
            theta,
            t_cut: s_star - t0,
        });
    }
    let [j, dj] = sol.y_end();
    // with G ≤ 0 from t_max on and j, j' > 0, j never returns to zero
    if surface.is_von_mangoldt() && surface.curvature(surface.t_max()) <= 0.0 && j > 0.0 && dj > 0.0
    {
        Ok(CutLocus::Empty)
    } else {
        Err(Error::TruncationTooShort(format!(
            "no conjugate point before t_max = {}",
            surface.t_max()
        )))
    }
}
