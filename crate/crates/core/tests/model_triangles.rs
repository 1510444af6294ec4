mod oracles;

use std::f64::consts::PI;

use ftct_core::model_surface::*;
use ftct_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gauss_tanh() -> ModelSurface {
    build_profile(ProfileSpec::ClosedForm(ClosedForm::GaussTanh), 3.0).unwrap()
}

fn plane() -> ModelSurface {
    build_profile(ProfileSpec::ClosedForm(ClosedForm::Plane), 20.0).unwrap()
}

fn law_of_cosines_angle(adj1: f64, adj2: f64, opp: f64) -> f64 {
    ((adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2)).acos()
}

#[test]
fn planar_triangles_match_trigonometry() {
    let s = plane();
    let t = comparison_triangle(&s, 3.0, 4.0, 5.0).unwrap();
    assert!((t.angle_p - PI / 2.0).abs() < 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.5..5.0);
        let b = rng.gen_range(0.5..5.0);
        let c = rng.gen_range((a - b).abs() + 0.05..a + b - 0.05);
        let t = comparison_triangle(&s, a, b, c).unwrap();
        assert!((t.angle_p - law_of_cosines_angle(a, b, c)).abs() < 1e-8);
        assert!((t.angle_x - law_of_cosines_angle(a, c, b)).abs() < 1e-7);
        assert!((t.angle_y - law_of_cosines_angle(b, c, a)).abs() < 1e-7);
    }
}

#[test]
fn collinear_triangle_runs_through_pole() {
    let t = comparison_triangle(&plane(), 2.0, 3.0, 5.0).unwrap();
    assert_eq!(t.delta_theta, PI);
    assert_eq!(t.angle_x, 0.0);
}

#[test]
fn comparison_triangle_round_trip() {
    let s = gauss_tanh();
    for (a, b, c) in [(1.2, 1.5, 0.45), (0.9, 1.1, 0.5), (0.5, 1.4, 1.0)] {
        let t = comparison_triangle(&s, a, b, c).unwrap();
        let (d, _) = s.surface_distance(t.x, t.y).unwrap();
        assert!((d - c).abs() < 1e-6, "{d} vs {c}");
        assert!((0.0..=PI).contains(&t.delta_theta));
        let (dx, _) = s.surface_distance(PolarPoint::new(0.0, 0.0), t.x).unwrap();
        assert_eq!(dx, a);
    }
}

#[test]
fn meridian_point_is_closest_on_circles() {
    let s = gauss_tanh();
    let x = PolarPoint::new(1.0, 0.0);
    for t in [0.4, 0.8, 1.3] {
        let (on_meridian, _) = s.surface_distance(x, PolarPoint::new(t, 0.0)).unwrap();
        for k in 1..=12 {
            let th = PI * k as f64 / 12.0;
            let (d, _) = s.surface_distance(x, PolarPoint::new(t, th)).unwrap();
            assert!(d > on_meridian);
        }
    }
}

#[test]
fn distance_increases_with_angle() {
    let s = gauss_tanh();
    let x = PolarPoint::new(1.1, 0.0);
    for t in [0.3, 0.9, 1.6] {
        let mut prev = 0.0;
        for k in 1..=24 {
            let th = PI * k as f64 / 24.0;
            let (d, _) = s.surface_distance(x, PolarPoint::new(t, th)).unwrap();
            assert!(d > prev, "t={t} θ={th}");
            prev = d;
        }
    }
}

#[test]
fn cut_locus_of_flat_and_hyperbolic_planes_is_empty() {
    for cf in [ClosedForm::Plane, ClosedForm::Hyperbolic] {
        let s = build_profile(ProfileSpec::ClosedForm(cf), 5.0).unwrap();
        assert_eq!(cut_locus_ray(&s, 1.0, 0.3).unwrap(), CutLocus::Empty);
    }
}

#[test]
fn cut_point_agrees_with_dense_shooting() {
    let s = gauss_tanh();
    let CutLocus::Ray { theta, t_cut } = cut_locus_ray(&s, 1.0, 0.0).unwrap() else {
        panic!("expected a cut ray");
    };
    assert_eq!(theta, PI);
    let shot =
        oracles::shooting::cut_point_by_shooting(&oracles::gauss_tanh, 1.0, 10_000, 3.0).unwrap();
    assert!((t_cut - shot).abs() < 1e-2, "{t_cut} vs {shot}");
}

#[test]
fn planar_double_triangle_matches_trigonometry() {
    let s = plane();
    let (x, y, z) = (
        PolarPoint::new(2.0, 0.0),
        PolarPoint::new(2.5, 0.9),
        PolarPoint::new(2.5, 1.7),
    );
    let r = double_triangle_check(&s, x, y, z).unwrap();
    let cart = |p: PolarPoint| (p.t * p.theta.cos(), p.t * p.theta.sin());
    let dist = |a: PolarPoint, b: PolarPoint| {
        let (ax, ay) = cart(a);
        let (bx, by) = cart(b);
        (ax - bx).hypot(ay - by)
    };
    let (dxy, dyz) = (dist(x, y), dist(y, z));
    let glued = dxy + dyz;
    assert!((r.angle_x - law_of_cosines_angle(x.t, dxy, y.t)).abs() < 1e-7);
    assert!((r.angle_q - law_of_cosines_angle(x.t, glued, z.t)).abs() < 1e-7);
    assert!((r.angle_z - law_of_cosines_angle(z.t, dyz, y.t)).abs() < 1e-7);
    assert!((r.angle_r - law_of_cosines_angle(z.t, glued, x.t)).abs() < 1e-7);
    assert!(r.slack() > 0.0);
}

#[test]
fn straight_double_triangle_gives_equality() {
    let s = gauss_tanh();
    // z̃ on the continuation of the geodesic from x̃ through ỹ: the angles at ỹ sum to π
    let x = PolarPoint::new(1.0, 0.0);
    let (_, path) = s.surface_distance(x, PolarPoint::new(0.9, 1.5)).unwrap();
    let mid = path.samples[path.samples.len() / 3].x;
    let end = path.end().x;
    let y = PolarPoint::new(mid[0], mid[1]);
    let z = PolarPoint::new(end[0], end[1]);
    let r = double_triangle_check(&s, x, y, z).unwrap();
    assert!((r.angle_sum_at_y - PI).abs() < 1e-6);
    assert!((r.angle_x - r.angle_q).abs() < 1e-6);
    assert!((r.angle_z - r.angle_r).abs() < 1e-6);
    assert!(r.theta_z_below_pi());
}

#[test]
fn double_triangle_preconditions() {
    let s = gauss_tanh();
    let r = double_triangle_check(
        &s,
        PolarPoint::new(1.0, 0.0),
        PolarPoint::new(1.0, 1.0),
        PolarPoint::new(1.0, 0.5),
    );
    assert!(matches!(r, Err(Error::PreconditionFailed(_))));
}
