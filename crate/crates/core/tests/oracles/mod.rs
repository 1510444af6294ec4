//! Independent reference computations shared by integration tests.
#![allow(dead_code)]

pub mod fmm;
pub mod shooting;

/// `e^{-t²} tanh t` and its first two derivatives, differentiated by hand.
pub fn gauss_tanh(t: f64) -> [f64; 3] {
    let e = (-t * t).exp();
    let th = t.tanh();
    let sech2 = 1.0 - th * th;
    let f = e * th;
    let df = e * (sech2 - 2.0 * t * th);
    // d/dt [sech² − 2t tanh] = −2 sech² tanh − 2 tanh − 2t sech²
    let inner_d = -2.0 * sech2 * th - 2.0 * th - 2.0 * t * sech2;
    let ddf = -2.0 * t * df + e * inner_d;
    [f, df, ddf]
}

pub fn gauss_tanh_curvature(t: f64) -> f64 {
    8.0 * t / (2.0 * t).sinh() + 2.0 / t.cosh().powi(2) - 4.0 * t * t + 2.0
}
