//! Dense shooting over initial angles with a fixed-step RK4 integrator in the
//! θ-parametrisation `t'' = f'(2t'² + f²)/f`.

use rayon::prelude::*;

/// Radius at which the geodesic from `(t0, 0)` leaving at angle `psi` to the
/// outward meridian meets `θ = theta_end`; `None` if it leaves `[t_min, t_max]`.
pub fn crossing_radius(
    f: &(dyn Fn(f64) -> [f64; 3] + Sync),
    t0: f64,
    psi: f64,
    theta_end: f64,
    steps: usize,
    t_min: f64,
    t_max: f64,
) -> Option<f64> {
    let rhs = |y: [f64; 2]| -> [f64; 2] {
        let [fv, df, _] = f(y[0]);
        [y[1], df * (2.0 * y[1] * y[1] + fv * fv) / fv]
    };
    let h = theta_end / steps as f64;
    let mut y = [t0, f(t0)[0] / psi.tan()];
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !(y[0] > t_min && y[0] < t_max) {
            return None;
        }
    }
    Some(y[0])
}

/// Smallest radius at which geodesics from `(t0, 0)` cross the opposite
/// meridian, over `n` equally spaced initial angles in `(0, π)`.
pub fn cut_point_by_shooting(
    f: &(dyn Fn(f64) -> [f64; 3] + Sync),
    t0: f64,
    n: usize,
    t_max: f64,
) -> Option<f64> {
    (1..n)
        .into_par_iter()
        .filter_map(|k| {
            let psi = std::f64::consts::PI * k as f64 / n as f64;
            crossing_radius(f, t0, psi, std::f64::consts::PI, 4000, 0.02, t_max)
        })
        .reduce_with(f64::min)
}
