//! Profile functions `f` and radial curvature functions `G` of a surface of
//! revolution `dt² + f(t)² dθ²`.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::ode::{self, OdeOptions};

/// Below this radius profiles are evaluated from their Taylor series.
pub const SERIES_RADIUS: f64 = 1e-3;

/// Profiles known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `f(t) = t`
    Plane,
    /// `f(t) = sinh t`
    Hyperbolic,
    /// `f(t) = e^{-t²} tanh t`
    GaussTanh,
}

impl ClosedForm {
    pub fn eval<S: Scalar>(&self, t: S) -> S {
        match self {
            Self::Plane => t,
            Self::Hyperbolic => t.sinh(),
            Self::GaussTanh => (-(t * t)).exp() * t.tanh(),
        }
    }

    /// `(f, f', f'')` at `t`.
    pub fn derivs(&self, t: f64) -> [f64; 3] {
        let j = self.eval(Jet::<1>::variable(t, 0));
        [j.v, j.g[0], j.h[0][0]]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Plane => "plane",
            Self::Hyperbolic => "hyperbolic",
            Self::GaussTanh => "gauss_tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plane" => Some(Self::Plane),
            "hyperbolic" => Some(Self::Hyperbolic),
            "gauss_tanh" => Some(Self::GaussTanh),
            _ => None,
        }
    }
}

/// `8t/sinh 2t + 2/cosh² t − 4t² + 2`, the curvature of the `e^{-t²} tanh t` profile.
pub fn gauss_tanh_curvature(t: f64) -> f64 {
    let ratio = if t.abs() < 1e-4 {
        // 8t/sinh 2t = 4 (1 − (2t)²/6 + 7(2t)⁴/360)
        let u = 4.0 * t * t;
        4.0 * (1.0 - u / 6.0 + 7.0 * u * u / 360.0)
    } else {
        8.0 * t / (2.0 * t).sinh()
    };
    let c = t.cosh();
    ratio + 2.0 / (c * c) - 4.0 * t * t + 2.0
}

/// Radial curvature functions `G(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Curvature {
    Constant(f64),
    /// The closed-form curvature of [`ClosedForm::GaussTanh`].
    GaussTanh,
    /// `−f''/f` of a closed-form profile.
    OfProfile(ClosedForm),
    /// `base(t) + amplitude · e^{−rate·t}`
    ExpBump {
        base: Box<Curvature>,
        amplitude: f64,
        rate: f64,
    },
    /// `base(t) − delta`
    Shifted {
        base: Box<Curvature>,
        delta: f64,
    },
}

impl Curvature {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(k) => *k,
            Self::GaussTanh => gauss_tanh_curvature(t),
            Self::OfProfile(cf) => {
                // G is even and smooth; −f''/f is 0/0 at the pole
                let tt = t.abs().max(1e-6);
                let [f, _, f2] = cf.derivs(tt);
                -f2 / f
            }
            Self::ExpBump {
                base,
                amplitude,
                rate,
            } => base.eval(t) + amplitude * (-rate * t).exp(),
            Self::Shifted { base, delta } => base.eval(t) - delta,
        }
    }

    /// Parses `const(k)`, `gauss_tanh`, `gauss_tanh+exp(a,r)` and `…-shift(d)` forms.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_suffix(')') {
            if let Some(idx) = rest.rfind("+exp(") {
                let base = Self::parse(&rest[..idx])?;
                let mut it = rest[idx + 5..].split(',');
                let amplitude = it.next()?.trim().parse().ok()?;
                let rate = it.next()?.trim().parse().ok()?;
                if it.next().is_some() {
                    return None;
                }
                return Some(Self::ExpBump {
                    base: Box::new(base),
                    amplitude,
                    rate,
                });
            }
            if let Some(idx) = rest.rfind("-shift(") {
                let base = Self::parse(&rest[..idx])?;
                let delta = rest[idx + 7..].trim().parse().ok()?;
                return Some(Self::Shifted {
                    base: Box::new(base),
                    delta,
                });
            }
            if let Some(k) = rest.strip_prefix("const(") {
                return Some(Self::Constant(k.trim().parse().ok()?));
            }
            return None;
        }
        match s {
            "gauss_tanh" => Some(Self::GaussTanh),
            _ => None,
        }
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(k) => write!(f, "const({k})"),
            Self::GaussTanh => write!(f, "gauss_tanh"),
            Self::OfProfile(cf) => write!(f, "curvature_of({})", cf.name()),
            Self::ExpBump {
                base,
                amplitude,
                rate,
            } => write!(f, "{base}+exp({amplitude},{rate})"),
            Self::Shifted { base, delta } => write!(f, "{base}-shift({delta})"),
        }
    }
}

/// Solution of `f'' + G f = 0`, `f(0) = 0`, `f'(0) = 1`, stored at the
/// accepted integrator nodes and interpolated by quintic Hermite polynomials
/// (values, first and second derivatives match at every node).
#[derive(Debug, Clone)]
pub struct ProfileTable {
    ts: Vec<f64>,
    fs: Vec<f64>,
    dfs: Vec<f64>,
    ddfs: Vec<f64>,
    g0: f64,
}

impl ProfileTable {
    pub fn solve(curvature: &Curvature, t_max: f64) -> Result<Self> {
        let g0 = curvature.eval(0.0);
        let t0 = SERIES_RADIUS;
        let y0 = [t0 - g0 * t0.powi(3) / 6.0, 1.0 - 0.5 * g0 * t0 * t0];
        let mut rhs =
            |t: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], -curvature.eval(t) * y[0]]) };
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-16,
            max_step: 0.005,
            max_steps: 2_000_000,
        };
        let sol = ode::integrate(&mut rhs, t0, y0, t_max, &opts, None, None)?;
        let mut table = Self {
            ts: Vec::with_capacity(sol.ts.len()),
            fs: Vec::with_capacity(sol.ts.len()),
            dfs: Vec::with_capacity(sol.ts.len()),
            ddfs: Vec::with_capacity(sol.ts.len()),
            g0,
        };
        for (t, y) in sol.ts.iter().zip(&sol.ys) {
            table.ts.push(*t);
            table.fs.push(y[0]);
            table.dfs.push(y[1]);
            table.ddfs.push(-curvature.eval(*t) * y[0]);
        }
        Ok(table)
    }

    pub fn t_max(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// `(f, f', f''_interp)` where the last entry is the second derivative of
    /// the interpolant itself.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        if t <= self.ts[0] {
            let g0 = self.g0;
            return [t - g0 * t.powi(3) / 6.0, 1.0 - 0.5 * g0 * t * t, -g0 * t];
        }
        let i = self
            .ts
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(self.ts.len() - 2);
        let h = self.ts[i + 1] - self.ts[i];
        let s = ((t - self.ts[i]) / h).clamp(0.0, 1.0 + 1e-9);
        let (y0, d0, e0) = (self.fs[i], self.dfs[i] * h, self.ddfs[i] * h * h);
        let (y1, d1, e1) = (
            self.fs[i + 1],
            self.dfs[i + 1] * h,
            self.ddfs[i + 1] * h * h,
        );
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
        let dh0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let dh1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let dh2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
        let dh3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let dh4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let dh5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
        let ddh0 = -60.0 * s + 180.0 * s2 - 120.0 * s3;
        let ddh1 = -36.0 * s + 96.0 * s2 - 60.0 * s3;
        let ddh2 = 0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3);
        let ddh3 = 60.0 * s - 180.0 * s2 + 120.0 * s3;
        let ddh4 = -24.0 * s + 84.0 * s2 - 60.0 * s3;
        let ddh5 = 0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3);
        let f = h0 * y0 + h1 * d0 + h2 * e0 + h3 * y1 + h4 * d1 + h5 * e1;
        let df = (dh0 * y0 + dh1 * d0 + dh2 * e0 + dh3 * y1 + dh4 * d1 + dh5 * e1) / h;
        let ddf = (ddh0 * y0 + ddh1 * d0 + ddh2 * e0 + ddh3 * y1 + ddh4 * d1 + ddh5 * e1) / (h * h);
        [f, df, ddf]
    }

    /// Node radii of the underlying solution.
    pub fn nodes(&self) -> &[f64] {
        &self.ts
    }
}

/// How a surface's profile was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    ClosedForm(ClosedForm),
    Curvature(Curvature),
}

pub(crate) fn bisect(mut g: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> Result<f64> {
    let ga = g(a);
    if ga == 0.0 {
        return Ok(a);
    }
    if ga.signum() == g(b).signum() {
        return Err(Error::PreconditionFailed(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * m.abs().max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
