mod oracles;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftct_core::angles::*;
use ftct_core::manifold::*;
use ftct_core::model_surface::*;
use ftct_core::norms::MinkowskiNorm;
use oracles::shooting::crossing_radius;

fn box_chart(metric: MetricField, r: f64) -> FinslerChart {
    FinslerChart::new(
        metric,
        ChartDomain::Box {
            min: Vector2::new(-r, -r),
            max: Vector2::new(r, r),
        },
        BasePoint::Point(Vector2::zeros()),
    )
    .unwrap()
}

fn gauss_tanh() -> ModelSurface {
    build_profile(ProfileSpec::ClosedForm(ClosedForm::GaussTanh), 3.0).unwrap()
}

#[test]
fn radial_extension_angles() {
    // polar chart based at the pole
    let c = FinslerChart::polar(gauss_tanh());
    let path = geodesic_ivp(&c, &Vector2::new(0.5, 1.0), &Vector2::new(1.0, 0.0), 1.0).unwrap();
    let m = angle_difference_quotient(&c, &path, 0.3, Side::Forward).unwrap();
    assert!(1.0 + m.forward_angle.unwrap().cos() < 1e-9);
    let m = angle_difference_quotient(&c, &path, 1.0, Side::Backward).unwrap();
    assert!(1.0 - m.backward_angle.unwrap().cos() < 1e-9);

    // Euclidean chart based at a point
    let e = FinslerChart::minkowski(MinkowskiNorm::euclidean(), 5.0);
    let path = geodesic_ivp(&e, &Vector2::new(0.6, 0.8), &Vector2::new(0.6, 0.8), 1.0).unwrap();
    let m = angle_difference_quotient(&e, &path, 0.5, Side::Both).unwrap();
    // angles near 0 and π are ill-conditioned; compare cosines
    assert!(1.0 + m.forward_angle.unwrap().cos() < 1e-6);
    assert!(1.0 - m.backward_angle.unwrap().cos() < 1e-6);
}

#[test]
fn euclidean_transversal_angles() {
    let e = FinslerChart::minkowski(MinkowskiNorm::euclidean(), 5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let z = Vector2::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0));
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let dir = Vector2::new(a.cos(), a.sin());
        let path = geodesic_ivp(&e, &(z - dir * 0.3), &dir, 0.6).unwrap();
        let want = PI - z.angle(&dir);
        let dq = angle_difference_quotient(&e, &path, 0.3, Side::Both).unwrap();
        assert!(
            (dq.forward_angle.unwrap() - want).abs() < 1e-5,
            "{dq:?} {want}"
        );
        assert!((dq.backward_angle.unwrap() - (PI - want)).abs() < 1e-5);
        let fv = angle_first_variation(&e, &z, &dir, Side::Both).unwrap();
        assert!((fv.forward_angle.unwrap() - want).abs() < 1e-8);
    }
}

#[test]
fn riemannian_first_variation_is_the_metric_angle() {
    // the conformal metric measures angles like the Euclidean one
    let c = box_chart(MetricField::Conformal { a: 0.3 }, 1.5);
    let z = Vector2::new(0.7, 0.4);
    let dir = Vector2::new(-0.2, 1.0);
    let gp = radial_direction_set(&c, &z).unwrap();
    assert_eq!(gp.len(), 1);
    let fv = angle_first_variation(&c, &z, &dir, Side::Both).unwrap();
    assert!((fv.backward_angle.unwrap() - gp[0].angle(&dir)).abs() < 1e-10);
    assert!((fv.forward_angle.unwrap() + fv.backward_angle.unwrap() - PI).abs() < 1e-10);
}

#[test]
fn methods_agree_on_randers_charts() {
    let m = MetricField::randers_affine(
        Matrix2::new(1.0, 0.1, 0.1, 1.2),
        Vector2::new(0.3, -0.1),
        Matrix2::new(0.2, 0.0, 0.05, -0.1),
    )
    .unwrap();
    let c = box_chart(m, 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut saw_heavy_reverse = false;
    for _ in 0..6 {
        let z = Vector2::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
        if z.norm() < 0.3 {
            continue;
        }
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let dir = Vector2::new(a.cos(), a.sin());
        let path = geodesic_ivp(&c, &z, &dir, 0.2).unwrap();
        let (z, zv) = path.point_at(0.1);
        let dq = angle_difference_quotient(&c, &path, 0.1, Side::Both).unwrap();
        let fv = angle_first_variation(&c, &z, &zv, Side::Both).unwrap();
        saw_heavy_reverse |= fv.lambda > 1.0;
        assert!(
            (dq.forward_angle.unwrap() - fv.forward_angle.unwrap()).abs() < 5e-4,
            "{dq:?} {fv:?}"
        );
        assert!(
            (dq.backward_angle.unwrap() - fv.backward_angle.unwrap()).abs() < 5e-4,
            "{dq:?} {fv:?}"
        );
        assert!((fv.forward_angle.unwrap() + fv.backward_angle.unwrap() - PI).abs() < 1e-5);
    }
    assert!(saw_heavy_reverse);
}

#[test]
fn two_minimal_geodesics_split_the_angles() {
    let p = Vector2::new(1.0, 0.0);
    let chart = FinslerChart::new(
        MetricField::Revolution(Arc::new(gauss_tanh())),
        ChartDomain::Annulus {
            t_min: POLAR_INNER_RADIUS,
            t_max: 3.0,
        },
        BasePoint::Point(p),
    )
    .unwrap();
    let z = Vector2::new(1.0, PI);
    // initial angle of the symmetric minimisers from the dense-shooting oracle
    let f = oracles::gauss_tanh;
    let r = |psi: f64| crossing_radius(&f, 1.0, psi, PI, 4000, 0.02, 3.0).unwrap_or(0.0) - 1.0;
    let (mut lo, mut hi) = (0.5, PI / 2.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if r(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let psi = 0.5 * (lo + hi);
    // moving along the parallel: g_v(v, ċ) = ±sin ψ for the two minimisers
    let dir = Vector2::new(0.0, 1.0);
    let fv = angle_first_variation(&chart, &z, &dir, Side::Both).unwrap();
    let want = (psi.sin()).acos();
    assert!(
        (fv.forward_angle.unwrap() - want).abs() < 1e-4,
        "{fv:?} {want}"
    );
    assert!((fv.backward_angle.unwrap() - want).abs() < 1e-4);
    assert!(fv.forward_angle.unwrap() + fv.backward_angle.unwrap() < PI - 0.1);
}

#[test]
fn interior_angle_sum_is_at_most_pi() {
    let c = box_chart(MetricField::Conformal { a: -0.2 }, 1.5);
    let x = Vector2::new(0.8, -0.3);
    let y = Vector2::new(-0.2, 0.9);
    let edge = minimal_geodesic(&c, &x, &y).unwrap().paths.remove(0);
    for s in [0.25, 0.5, 0.75].map(|k| k * edge.forward_length) {
        let m = angle_difference_quotient(&c, &edge, s, Side::Both).unwrap();
        let sum = m.forward_angle.unwrap() + m.backward_angle.unwrap();
        assert!(sum <= PI + 1e-5, "{sum}");
    }
}

#[test]
fn angle_range_is_checked() {
    let e = FinslerChart::minkowski(MinkowskiNorm::euclidean(), 5.0);
    let path = geodesic_ivp(&e, &Vector2::new(1.0, 0.0), &Vector2::new(0.0, 1.0), 1.0).unwrap();
    assert!(angle_difference_quotient(&e, &path, 1.0, Side::Forward).is_err());
    assert!(angle_difference_quotient(&e, &path, 0.0, Side::Backward).is_err());
}
