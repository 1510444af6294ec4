//! Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! The solver works on fixed-size states `[f64; N]`, integrates forward or
//! backward in time, and can stop at the first sign change of a scalar event
//! function, located on the dense output by bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-2,
            ..Self::default()
        }
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    rc: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            let r = &self.rc;
            *yi = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

/// Why the integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    Event,
    Stopped,
}

/// Accepted grid points plus dense output over the whole span.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub ts: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    steps: Vec<DenseStep<N>>,
    pub termination: Termination,
}

impl<const N: usize> Solution<N> {
    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }
    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }
    pub fn y_end(&self) -> [f64; N] {
        *self.ys.last().unwrap()
    }

    /// Dense-output value at `t` (clamped to the integrated span).
    pub fn at(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.ys[0];
        }
        let forward = self.t_end() >= self.t_start();
        let key = |s: &DenseStep<N>| if forward { s.t0 } else { -s.t0 };
        let tk = if forward { t } else { -t };
        let idx = self
            .steps
            .partition_point(|s| key(s) <= tk)
            .saturating_sub(1)
            .min(self.steps.len() - 1);
        let step = &self.steps[idx];
        let lo = step.t0.min(step.t0 + step.h);
        let hi = step.t0.max(step.t0 + step.h);
        step.eval(t.clamp(lo, hi))
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Right-hand side; returning `Err` aborts the integration with that error.
pub trait Rhs<const N: usize> {
    fn eval(&mut self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

impl<const N: usize, F> Rhs<N> for F
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    fn eval(&mut self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        self(t, y)
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `event` is a scalar function whose first sign change (from its value at
/// `t0`) terminates the integration at the located root. `stop` is checked
/// after every accepted step; returning `true` ends the integration there.
pub fn integrate<const N: usize>(
    rhs: &mut impl Rhs<N>,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    mut event: Option<&mut dyn FnMut(f64, &[f64; N]) -> f64>,
    mut stop: Option<&mut dyn FnMut(f64, &[f64; N]) -> bool>,
) -> Result<Solution<N>> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut sol = Solution {
        ts: vec![t0],
        ys: vec![y0],
        steps: Vec::new(),
        termination: Termination::ReachedEnd,
    };
    if span == 0.0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs.eval(t, &y)?;
    let mut g_prev = event.as_mut().map(|g| g(t, &y));

    // initial step guess (Hairer, Nørsett & Wanner, II.4)
    let norm = |z: &[f64; N]| -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs();
            s += (z[i] / sc).powi(2);
        }
        (s / N as f64).sqrt()
    };
    let d0 = norm(&y);
    let d1 = norm(&k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1 = lin(&y, h0 * dir, &[(1.0, &k1)]);
    let k_probe = rhs.eval(t + h0 * dir, &y1)?;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = k_probe[i] - k1[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let mut h = (100.0 * h0).min(h1);
    h = h.min(opts.max_step).min(span).max(1e-14);

    let mut n = 0usize;
    let mut last_err: f64 = 1e-4;
    loop {
        n += 1;
        if n > opts.max_steps {
            return Err(Error::IntegrationFailure(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-15 * span.max(1.0) {
            break;
        }
        let hs = h.min(remaining) * dir;
        let k2 = rhs.eval(t + C2 * hs, &lin(&y, hs, &[(A21, &k1)]))?;
        let k3 = rhs.eval(t + C3 * hs, &lin(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs.eval(
            t + C4 * hs,
            &lin(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = rhs.eval(
            t + C5 * hs,
            &lin(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs.eval(
            t + hs,
            &lin(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = lin(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs.eval(t + hs, &y_new)?;
        let mut err = 0.0;
        for i in 0..N {
            let e =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::IntegrationFailure(format!(
                    "non-finite state near t = {t}"
                )));
            }
            continue;
        }
        if err <= 1.0 {
            let mut rc = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                rc[0][i] = y[i];
                rc[1][i] = ydiff;
                rc[2][i] = bspl;
                rc[3][i] = ydiff - hs * k7[i] - bspl;
                rc[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h: hs, rc };
            let t_new = t + hs;

            if let (Some(g), Some(gp)) = (event.as_mut(), g_prev) {
                let gn = g(t_new, &y_new);
                if gp != 0.0 && gn.signum() != gp.signum() {
                    let (mut a, mut b) = (t, t_new);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        let gm = g(m, &step.eval(m));
                        if gm.signum() == gp.signum() && gm != 0.0 {
                            a = m;
                        } else {
                            b = m;
                        }
                        if (b - a).abs() < 1e-15 * (1.0 + t_new.abs()) {
                            break;
                        }
                    }
                    let te = b;
                    let ye = step.eval(te);
                    sol.steps.push(DenseStep {
                        t0: t,
                        h: te - t,
                        rc: refit(&step, t, te),
                    });
                    sol.ts.push(te);
                    sol.ys.push(ye);
                    sol.termination = Termination::Event;
                    return Ok(sol);
                }
                g_prev = Some(gn);
            }

            sol.steps.push(step);
            sol.ts.push(t_new);
            sol.ys.push(y_new);
            t = t_new;
            y = y_new;
            k1 = k7;

            if let Some(s) = stop.as_mut() {
                if s(t, &y) {
                    sol.termination = Termination::Stopped;
                    return Ok(sol);
                }
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                // PI step control
                (0.9 * err.powf(-0.17) * last_err.powf(0.04)).clamp(0.2, 5.0)
            };
            last_err = err.max(1e-4);
            h = (h * fac).min(opts.max_step);
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow near t = {t}"
                )));
            }
        }
    }
    Ok(sol)
}

/// Re-parametrizes a dense step so that it ends at `te` instead of `t0 + h`.
///
/// The quartic interpolant is resampled at five points and refitted; the
/// truncated step is only ever evaluated inside `[t0, te]`.
fn refit<const N: usize>(step: &DenseStep<N>, t0: f64, te: f64) -> [[f64; N]; 5] {
    let h = te - t0;
    if h == 0.0 {
        let mut rc = [[0.0; N]; 5];
        rc[0] = step.eval(t0);
        return rc;
    }
    // Sample the old polynomial at th = 0, 1/4, 1/2, 3/4, 1 of the new step and
    // solve for the coefficients of the same nested form.
    let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
    let samples: Vec<[f64; N]> = nodes.iter().map(|s| step.eval(t0 + s * h)).collect();
    // basis of nested form: p(th) = r0 + th r1 + th(1-th) r2 + th²(1-th) r3 + th²(1-th)² r4
    let basis = |th: f64| {
        let th1 = 1.0 - th;
        [1.0, th, th * th1, th * th * th1, th * th * th1 * th1]
    };
    let mut m = nalgebra::SMatrix::<f64, 5, 5>::zeros();
    for (r, th) in nodes.iter().enumerate() {
        let b = basis(*th);
        for c in 0..5 {
            m[(r, c)] = b[c];
        }
    }
    let lu = m.lu();
    let mut rc = [[0.0; N]; 5];
    for i in 0..N {
        let rhs = nalgebra::SVector::<f64, 5>::from_fn(|r, _| samples[r][i]);
        let x = lu.solve(&rhs).expect("interpolation basis is nonsingular");
        for c in 0..5 {
            rc[c][i] = x[c];
        }
    }
    rc
}
