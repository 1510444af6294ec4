//! Surfaces of revolution `dt² + f(t)² dθ²` used as comparison models.

mod cut_locus;
mod geodesics;
pub mod profile;
mod triangle;

use std::io::Write;
use std::sync::Arc;

pub use cut_locus::{cut_locus_ray, CutLocus};
pub use geodesics::{ModelGeodesic, PolarPoint};
pub use profile::{ClosedForm, Curvature, ProfileSpec, ProfileTable};
pub use triangle::{
    comparison_triangle, double_triangle_check, ComparisonTriangle, DoubleTriangleReport,
};

use crate::error::{Error, Result};
use crate::quad;
use profile::bisect;

const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone)]
enum Profile {
    Closed(ClosedForm),
    Table(Arc<ProfileTable>),
}

/// A surface of revolution around the pole `p̃` (at `t = 0`), truncated at `t_max`.
#[derive(Debug, Clone)]
pub struct ModelSurface {
    spec: ProfileSpec,
    curvature: Curvature,
    profile: Profile,
    t_max: f64,
    rho: Option<f64>,
    von_mangoldt: bool,
}

/// Builds a surface from a closed-form profile or by solving `f'' + G f = 0`.
pub fn build_profile(spec: ProfileSpec, t_max: f64) -> Result<ModelSurface> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::PreconditionFailed(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    let (curvature, profile) = match &spec {
        ProfileSpec::ClosedForm(cf) => (Curvature::OfProfile(*cf), Profile::Closed(*cf)),
        ProfileSpec::Curvature(g) => {
            let table = ProfileTable::solve(g, t_max)?;
            (g.clone(), Profile::Table(Arc::new(table)))
        }
    };
    let mut surface = ModelSurface {
        spec,
        curvature,
        profile,
        t_max,
        rho: None,
        von_mangoldt: false,
    };
    surface.analyze()?;
    Ok(surface)
}

impl ModelSurface {
    fn analyze(&mut self) -> Result<()> {
        let h = self.t_max / SCAN_POINTS as f64;
        let grid: Vec<f64> = (1..=SCAN_POINTS).map(|k| k as f64 * h).collect();
        let mut sign_changes = Vec::new();
        let mut prev_df = 1.0;
        let mut prev_t = 0.0;
        for &t in &grid {
            let [f, df, _] = self.derivs(t);
            if !(f > 0.0) {
                return Err(Error::ProfileVanishes(t));
            }
            if (prev_df > 0.0) != (df > 0.0) {
                sign_changes.push((prev_t, t));
            }
            prev_df = df;
            prev_t = t;
        }
        if sign_changes.len() > 1 {
            let a = bisect(|t| self.derivs(t)[1], sign_changes[0].0, sign_changes[0].1)?;
            let b = bisect(|t| self.derivs(t)[1], sign_changes[1].0, sign_changes[1].1)?;
            return Err(Error::RhoNotUnique(a, b));
        }
        self.rho = match sign_changes.first() {
            Some(&(a, b)) => Some(bisect(|t| self.derivs(t)[1], a, b)?),
            None => None,
        };
        let mut monotone = true;
        let mut prev = self.curvature(0.0);
        for &t in &grid {
            let g = self.curvature(t);
            if g > prev + 1e-12 * prev.abs().max(1.0) {
                monotone = false;
                break;
            }
            prev = g;
        }
        self.von_mangoldt = monotone;
        Ok(())
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn curvature_fn(&self) -> &Curvature {
        &self.curvature
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn is_von_mangoldt(&self) -> bool {
        self.von_mangoldt
    }

    /// `G(t)`.
    pub fn curvature(&self, t: f64) -> f64 {
        self.curvature.eval(t)
    }

    pub fn f(&self, t: f64) -> f64 {
        self.derivs(t)[0]
    }

    /// `(f, f', f'')` with `f'' = −G f`.
    pub fn derivs(&self, t: f64) -> [f64; 3] {
        match &self.profile {
            Profile::Closed(cf) => cf.derivs(t),
            Profile::Table(tab) => {
                let [f, df, _] = tab.eval(t);
                [f, df, -self.curvature.eval(t) * f]
            }
        }
    }

    /// Largest value of `|f'' + G f| / max(1, |f''|)` where `f''` is the
    /// second derivative of the stored interpolant, sampled between solver nodes.
    pub fn residual(&self) -> f64 {
        match &self.profile {
            Profile::Closed(_) => 0.0,
            Profile::Table(tab) => {
                let nodes = tab.nodes();
                let mut worst: f64 = 0.0;
                for w in nodes.windows(2) {
                    let t = 0.5 * (w[0] + w[1]);
                    let [f, _, ddf] = tab.eval(t);
                    let r = (ddf + self.curvature.eval(t) * f).abs() / ddf.abs().max(1.0);
                    worst = worst.max(r);
                }
                worst
            }
        }
    }

    /// Whether `G(ρ)` is distinguishable from zero.
    pub fn waist_curvature_nonzero(&self) -> bool {
        match self.rho {
            None => true,
            Some(rho) => {
                let scale = (0..=100)
                    .map(|k| self.curvature(self.t_max * k as f64 / 100.0).abs())
                    .fold(0.0, f64::max);
                self.curvature(rho).abs() > 1e-6 * scale.max(1e-300)
            }
        }
    }

    /// The surface with curvature `G − δ`.
    ///
    /// Fails with [`Error::TruncationTooShort`] if the original surface has a
    /// critical radius but the modified one does not reach its own before `t_max`.
    pub fn delta_modification(&self, delta: f64) -> Result<ModelSurface> {
        if !(delta >= 0.0) {
            return Err(Error::PreconditionFailed(format!(
                "delta must be non-negative, got {delta}"
            )));
        }
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let g = Curvature::Shifted {
            base: Box::new(self.curvature.clone()),
            delta,
        };
        let out = build_profile(ProfileSpec::Curvature(g), self.t_max)?;
        if self.rho.is_some() && out.rho.is_none() {
            return Err(Error::TruncationTooShort(format!(
                "modified profile has no critical radius below {}",
                self.t_max
            )));
        }
        Ok(out)
    }

    /// `∫₀ˡ f²`.
    pub fn integral_f_sq(&self, l: f64) -> f64 {
        quad::integrate(|t| self.f(t).powi(2), 0.0, l, 1e-13)
    }

    /// Writes `n + 1` equally spaced `t f` rows, 17 significant digits.
    pub fn export_profile(&self, n: usize, out: &mut dyn Write) -> std::io::Result<()> {
        for k in 0..=n {
            let t = self.t_max * k as f64 / n as f64;
            writeln!(out, "{:.16e} {:.16e}", t, self.f(t))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_hyperbolic_from_curvature() {
        let flat = build_profile(ProfileSpec::Curvature(Curvature::Constant(0.0)), 3.0).unwrap();
        let hyp = build_profile(ProfileSpec::Curvature(Curvature::Constant(-1.0)), 3.0).unwrap();
        for k in 1..=30 {
            let t = 0.1 * k as f64;
            assert!((flat.f(t) - t).abs() < 1e-11);
            assert!((hyp.f(t) - t.sinh()).abs() < 1e-10 * t.cosh());
        }
        assert!(flat.rho().is_none() && hyp.rho().is_none());
        assert!(flat.is_von_mangoldt() && hyp.is_von_mangoldt());
        assert!(
            flat.residual() < 1e-8 && hyp.residual() < 1e-8,
            "{} {}",
            flat.residual(),
            hyp.residual()
        );
    }

    #[test]
    fn sphere_vanishes() {
        let r = build_profile(ProfileSpec::Curvature(Curvature::Constant(1.0)), 4.0);
        assert!(
            matches!(r, Err(Error::ProfileVanishes(t)) if (t - std::f64::consts::PI).abs() < 1e-2)
        );
    }

    #[test]
    fn gauss_tanh_critical_radius() {
        let s = build_profile(ProfileSpec::ClosedForm(ClosedForm::GaussTanh), 3.0).unwrap();
        let rho = s.rho().unwrap();
        let c = rho.cosh();
        assert!((1.0 / (c * c) - 2.0 * rho * rho.tanh()).abs() < 1e-12);
        assert!(s.is_von_mangoldt());
        assert!(s.waist_curvature_nonzero());
    }

    #[test]
    fn delta_modification_of_plane() {
        let flat = build_profile(ProfileSpec::Curvature(Curvature::Constant(0.0)), 2.0).unwrap();
        let d = 0.3;
        let m = flat.delta_modification(d).unwrap();
        for k in 1..=20 {
            let t = 0.1 * k as f64;
            let want = (d.sqrt() * t).sinh() / d.sqrt();
            assert!((m.f(t) - want).abs() < 1e-10 * want.max(1.0));
        }
        assert_eq!(flat.delta_modification(0.0).unwrap().f(1.0), flat.f(1.0));
    }

    #[test]
    fn second_critical_radius_is_reported() {
        let s = build_profile(ProfileSpec::ClosedForm(ClosedForm::GaussTanh), 3.0).unwrap();
        let r = s.delta_modification(0.05);
        assert!(matches!(r, Err(Error::RhoNotUnique(a, b)) if a < b));
    }
}
