//! Jacobi fields of the radial variation `φ(t, s) = exp_p((t/l) exp_p⁻¹(c(s)))`.

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::manifold::{
    geodesic_flow, initial_velocity, integrate, minimal_geodesic, nonlinear_connection,
    solve_velocity, BasePoint, FinslerChart,
};

/// Step in `s` for the central difference across neighbouring radial geodesics.
pub const VARIATION_STEP: f64 = 1e-4;
const NODES: usize = 400;

/// A vector field along a curve, stored as values and derivatives on a grid
/// and read back by cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub ts: Vec<f64>,
    pub values: Vec<Vector2<f64>>,
    pub derivs: Vec<Vector2<f64>>,
}

impl SampledField {
    pub fn from_fn(ts: Vec<f64>, f: impl Fn(f64) -> (Vector2<f64>, Vector2<f64>)) -> Self {
        let (values, derivs) = ts.iter().map(|t| f(*t)).unzip();
        Self { ts, values, derivs }
    }

    /// Value and derivative at `t`.
    pub fn at(&self, t: f64) -> (Vector2<f64>, Vector2<f64>) {
        let n = self.ts.len();
        let t = t.clamp(self.ts[0], self.ts[n - 1]);
        let i = self
            .ts
            .partition_point(|s| *s <= t)
            .saturating_sub(1)
            .min(n - 2);
        let h = self.ts[i + 1] - self.ts[i];
        let u = (t - self.ts[i]) / h;
        let (u2, u3) = (u * u, u * u * u);
        let (a, da, b, db) = (
            self.values[i],
            self.derivs[i],
            self.values[i + 1],
            self.derivs[i + 1],
        );
        let x = a * (2.0 * u3 - 3.0 * u2 + 1.0)
            + da * (h * (u3 - 2.0 * u2 + u))
            + b * (-2.0 * u3 + 3.0 * u2)
            + db * (h * (u3 - u2));
        let dx = (a - b) * ((6.0 * u2 - 6.0 * u) / h)
            + da * (3.0 * u2 - 4.0 * u + 1.0)
            + db * (3.0 * u2 - 2.0 * u);
        (x, dx)
    }

    pub fn end(&self) -> (Vector2<f64>, Vector2<f64>) {
        (*self.values.last().unwrap(), *self.derivs.last().unwrap())
    }
}

/// A Jacobi field `J` along the radial geodesic `γ: [0, l] → M` from `p` to `x`.
#[derive(Debug, Clone)]
pub struct JacobiField {
    pub l: f64,
    /// `γ(t)` with derivative `γ̇(t)`.
    pub gamma: SampledField,
    /// `J(t)` with derivative `J̇(t)` (coordinate derivative).
    pub field: SampledField,
}

fn grid(l: f64) -> Vec<f64> {
    (0..=NODES).map(|k| l * k as f64 / NODES as f64).collect()
}

/// `J(t) = ∂φ/∂s(t, 0)` for the variation through the geodesic `c` with
/// `c(0) = x`, `ċ(0) = c_dir`, by central differences over `s = ±h`.
/// `x` must not be a cut point of the base point.
pub fn jacobi_field(
    chart: &FinslerChart,
    x: &Vector2<f64>,
    c_dir: &Vector2<f64>,
) -> Result<JacobiField> {
    let h = VARIATION_STEP;
    let (cp, _) = geodesic_flow(chart, x, c_dir, h)?;
    let (cm, _) = geodesic_flow(chart, x, c_dir, -h)?;
    match *chart.base() {
        BasePoint::Pole => {
            // radial geodesics from the pole are meridians
            let l = x[0];
            if !(l > 0.0) {
                return Err(Error::PreconditionFailed("x is the pole".into()));
            }
            let dl = (cp[0] - cm[0]) / (2.0 * h);
            let dth = (cp[1] - cm[1]) / (2.0 * h);
            let ts = grid(l);
            let gamma = SampledField::from_fn(ts.clone(), |t| {
                (Vector2::new(t, x[1]), Vector2::new(1.0, 0.0))
            });
            let field = SampledField::from_fn(ts, |t| {
                (Vector2::new(t * dl / l, dth), Vector2::new(dl / l, 0.0))
            });
            Ok(JacobiField { l, gamma, field })
        }
        BasePoint::Point(p) => {
            if p == *x {
                return Err(Error::PreconditionFailed("x is the base point".into()));
            }
            let sol = minimal_geodesic(chart, &p, x)?;
            let u0 = initial_velocity(&sol.paths[0]);
            let l = sol.distance;
            let mut curves = Vec::with_capacity(3);
            for target in [cm, *x, cp] {
                let u = solve_velocity(chart, &p, &target, u0)?;
                let len = chart.norm(&p, &u);
                curves.push((
                    integrate(
                        chart,
                        &p,
                        &u,
                        len,
                        len / 64.0,
                        crate::manifold::GEODESIC_TOL,
                    )?,
                    len,
                ));
            }
            // φ(t, s) is the unit-speed geodesic read at arclength t·len/l
            let phi = |k: usize, t: f64| -> (Vector2<f64>, Vector2<f64>) {
                let (sol, len) = &curves[k];
                let y = sol.at(t * len / l);
                (
                    Vector2::new(y[0], y[1]),
                    Vector2::new(y[2], y[3]) * (len / l),
                )
            };
            let ts = grid(l);
            let gamma = SampledField::from_fn(ts.clone(), |t| phi(1, t));
            let field = SampledField::from_fn(ts, |t| {
                let (xp, vp) = phi(2, t);
                let (xm, vm) = phi(0, t);
                ((xp - xm) / (2.0 * h), (vp - vm) / (2.0 * h))
            });
            Ok(JacobiField { l, gamma, field })
        }
    }
}

impl JacobiField {
    /// `g_{γ̇(l)}(γ̇(l), ċ(0))`, the slope of `t ↦ g_{γ̇}(γ̇, J)`.
    pub fn radial_slope(&self, chart: &FinslerChart, c_dir: &Vector2<f64>) -> Result<f64> {
        let (x, v) = self.gamma.end();
        Ok(chart.tensor(&x, &v)?.inner(&v, c_dir))
    }

    /// Largest deviation of `g_{γ̇(t)}(γ̇(t), J(t))` from the line `(slope/l) t`.
    pub fn linear_growth_residual(
        &self,
        chart: &FinslerChart,
        c_dir: &Vector2<f64>,
    ) -> Result<f64> {
        let a = self.radial_slope(chart, c_dir)? / self.l;
        let mut worst: f64 = 0.0;
        for (k, t) in self.gamma.ts.iter().enumerate() {
            let (x, v) = (self.gamma.values[k], self.gamma.derivs[k]);
            if !chart.contains(&x) {
                continue;
            }
            let g = chart.tensor(&x, &v)?.inner(&v, &self.field.values[k]);
            worst = worst.max((g - a * t).abs());
        }
        Ok(worst)
    }

    /// `J⊥(t) = J(t) − (g_{γ̇(l)}(γ̇(l), ċ(0))/l) t γ̇(t)`.
    pub fn orthogonal_component(
        &self,
        chart: &FinslerChart,
        c_dir: &Vector2<f64>,
    ) -> Result<JacobiField> {
        let a = self.radial_slope(chart, c_dir)? / self.l;
        let mut field = self.field.clone();
        for (k, t) in self.gamma.ts.iter().enumerate() {
            let (x, v) = (self.gamma.values[k], self.gamma.derivs[k]);
            let acc = if *t > 0.0 && chart.contains(&x) {
                chart.spray(&x, &v)? * -2.0
            } else {
                Vector2::zeros()
            };
            field.values[k] -= v * (a * t);
            field.derivs[k] -= v * a + acc * (a * t);
        }
        Ok(JacobiField {
            l: self.l,
            gamma: self.gamma.clone(),
            field,
        })
    }

    /// Covariant derivative `D_γ̇ J = J̇ + N(γ̇) J` at `t = l`.
    pub fn covariant_derivative_at_end(&self, chart: &FinslerChart) -> Result<Vector2<f64>> {
        let (x, v) = self.gamma.end();
        let (j, dj) = self.field.end();
        Ok(dj + nonlinear_connection(chart, &x, &v)? * j)
    }

    /// `I_l(J, J) = g_{γ̇(l)}(D_γ̇ J(l), J(l))`, valid because `J` is a Jacobi
    /// field vanishing at `t = 0`.
    pub fn index_by_boundary(&self, chart: &FinslerChart) -> Result<f64> {
        let (x, v) = self.gamma.end();
        let (j, _) = self.field.end();
        let dj = self.covariant_derivative_at_end(chart)?;
        Ok(chart.tensor(&x, &v)?.inner(&dj, &j))
    }
}
