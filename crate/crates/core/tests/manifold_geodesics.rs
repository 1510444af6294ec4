mod oracles;

use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftct_core::manifold::*;
use ftct_core::model_surface::*;
use ftct_core::norms::MinkowskiNorm;
use ftct_core::path::GeodesicPath;
use oracles::shooting::crossing_radius;

fn euclidean() -> FinslerChart {
    FinslerChart::minkowski(MinkowskiNorm::euclidean(), 10.0)
}

fn randers_half() -> FinslerChart {
    let n = MinkowskiNorm::randers(Matrix2::identity(), Vector2::new(0.5, 0.0)).unwrap();
    FinslerChart::minkowski(n, 4.0)
}

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

fn randers_affine() -> FinslerChart {
    let m = MetricField::randers_affine(
        Matrix2::new(1.0, 0.1, 0.1, 1.2),
        Vector2::new(0.1, -0.05),
        Matrix2::new(0.25, 0.0, 0.05, 0.0),
    )
    .unwrap();
    box_chart(m, 1.5)
}

fn gauss_tanh() -> ModelSurface {
    build_profile(ProfileSpec::ClosedForm(ClosedForm::GaussTanh), 3.0).unwrap()
}

fn max_speed_drift(chart: &FinslerChart, path: &GeodesicPath) -> f64 {
    path.samples
        .iter()
        .map(|s| (chart.norm(&s.x, &s.v) - 1.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn euclidean_ivp_is_a_segment() {
    let c = euclidean();
    let path = geodesic_ivp(&c, &Vector2::zeros(), &Vector2::new(3.0, 0.0), 2.0).unwrap();
    assert!((path.end().x - Vector2::new(2.0, 0.0)).norm() < 1e-12);
    assert_abs_diff_eq!(path.forward_length, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(path.reverse_length, 2.0, epsilon = 1e-10);
}

#[test]
fn meridians_are_geodesics() {
    let c = FinslerChart::polar(gauss_tanh());
    for (t0, th, s) in [(0.3, 0.0, 1.2), (1.0, 2.0, 0.5), (0.1, -1.0, 2.5)] {
        let path = geodesic_ivp(&c, &Vector2::new(t0, th), &Vector2::new(0.2, 0.0), s).unwrap();
        assert!(
            (path.end().x - Vector2::new(t0 + s, th)).norm() < 1e-9,
            "{:?}",
            path.end().x
        );
        assert!(max_speed_drift(&c, &path) < 1e-9);
    }
}

#[test]
fn constant_randers_geodesics_are_straight() {
    let c = randers_half();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let e = Vector2::new(a.cos(), a.sin());
        let x = Vector2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        // a straight line at F-unit speed has zero acceleration
        let unit = e / (1.0 + 0.5 * e[0]);
        assert!(c.spray(&x, &unit).unwrap().norm() * 2.0 < 1e-8);
        let path = geodesic_ivp(&c, &x, &e, 1.0).unwrap();
        assert!((path.end().x - (x + unit)).norm() < 1e-10);
    }
}

#[test]
fn euclidean_bvp() {
    let c = euclidean();
    let sol = minimal_geodesic(&c, &Vector2::zeros(), &Vector2::new(3.0, 4.0)).unwrap();
    assert_eq!(sol.paths.len(), 1);
    assert_abs_diff_eq!(sol.distance, 5.0, epsilon = 1e-9);
    let dm = symmetrized_distance(&c, &Vector2::zeros(), &Vector2::new(3.0, 4.0)).unwrap();
    assert_abs_diff_eq!(dm, 5.0, epsilon = 1e-9);
}

/// Length of a polyline under a constant norm, by direct summation.
fn polyline_length(n: &MinkowskiNorm, pts: &[Vector2<f64>]) -> f64 {
    pts.windows(2)
        .map(|w| n.evaluate(&(w[1] - w[0])).unwrap_or(0.0))
        .sum()
}

#[test]
fn randers_distances_and_asymmetry() {
    let c = randers_half();
    let n = MinkowskiNorm::randers(Matrix2::identity(), Vector2::new(0.5, 0.0)).unwrap();
    let (x, y) = (Vector2::zeros(), Vector2::new(1.0, 0.0));
    // direct integral along the segment: |Δ| (1 ± b·e)
    let forward = polyline_length(&n, &[x, y]);
    let backward = polyline_length(&n, &[y, x]);
    assert_abs_diff_eq!(forward, 1.5, epsilon = 1e-15);
    assert_abs_diff_eq!(backward, 0.5, epsilon = 1e-15);
    // no two-segment detour through a grid of midpoints is shorter
    let mut best = f64::INFINITY;
    for i in -20..=20 {
        for j in -20..=20 {
            let m = Vector2::new(0.5 + i as f64 * 0.1, j as f64 * 0.1);
            best = best.min(polyline_length(&n, &[x, m, y]));
        }
    }
    assert!(best >= forward - 1e-12);

    let d = distance(&c, &x, &y).unwrap();
    let d_back = distance(&c, &y, &x).unwrap();
    assert_abs_diff_eq!(d, forward, epsilon = 1e-8);
    assert_abs_diff_eq!(d_back, backward, epsilon = 1e-8);
    assert_abs_diff_eq!(
        symmetrized_distance(&c, &x, &y).unwrap(),
        forward,
        epsilon = 1e-8
    );
    assert_abs_diff_eq!(
        symmetrized_distance(&c, &y, &x).unwrap(),
        forward,
        epsilon = 1e-8
    );
    let path = &minimal_geodesic(&c, &x, &y).unwrap().paths[0];
    assert_abs_diff_eq!(path.reverse_length, backward, epsilon = 1e-8);
}

#[test]
fn same_meridian_distance() {
    let c = FinslerChart::polar(gauss_tanh());
    let d = distance(&c, &Vector2::new(0.4, 1.0), &Vector2::new(1.7, 1.0)).unwrap();
    assert_abs_diff_eq!(d, 1.3, epsilon = 1e-8);
    assert_abs_diff_eq!(base_distance(&c, &Vector2::new(0.4, 1.0)).unwrap(), 0.4);
}

#[test]
fn generic_solver_agrees_with_clairaut_solver() {
    // an unperturbed surface written through the perturbed family goes through
    // the generic multi-start shooting rather than the model-surface solver
    let s = Arc::new(gauss_tanh());
    let generic = FinslerChart::new(
        MetricField::RevolutionPerturbed {
            surface: s.clone(),
            eps: 0.0,
        },
        ChartDomain::Annulus {
            t_min: POLAR_INNER_RADIUS,
            t_max: 3.0,
        },
        BasePoint::Pole,
    )
    .unwrap();
    let model = FinslerChart::polar(gauss_tanh());
    for (x, y) in [
        (Vector2::new(1.0, 0.0), Vector2::new(1.2, 1.5)),
        (Vector2::new(0.5, 0.3), Vector2::new(1.4, -0.9)),
        (Vector2::new(1.5, 0.0), Vector2::new(1.3, 3.0)),
    ] {
        let a = distance(&generic, &x, &y).unwrap();
        let b = distance(&model, &x, &y).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-7);
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let charts = [
        randers_affine(),
        box_chart(MetricField::Conformal { a: 0.3 }, 1.5),
    ];
    for c in &charts {
        for _ in 0..6 {
            let p: Vec<Vector2<f64>> = (0..3)
                .map(|_| Vector2::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)))
                .collect();
            let d = |a: usize, b: usize| distance(c, &p[a], &p[b]).unwrap();
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-6);
            let dm = |a: usize, b: usize| symmetrized_distance(c, &p[a], &p[b]).unwrap();
            assert!(dm(0, 2) <= dm(0, 1) + dm(1, 2) + 1e-6);
            assert_abs_diff_eq!(dm(0, 1), dm(1, 0), epsilon = 1e-8);
            assert!(dm(0, 1) > 0.0);
            assert_eq!(dm(2, 2), 0.0);
        }
    }
}

#[test]
fn geodesics_stay_unit_speed_and_satisfy_the_equation() {
    let c = randers_affine();
    let path = geodesic_ivp(&c, &Vector2::new(-0.5, -0.2), &Vector2::new(1.0, 0.4), 1.2).unwrap();
    assert!(max_speed_drift(&c, &path) < 1.2e-6);
    assert!(geodesic_residual(&c, &path).unwrap() < 1e-6);
}

#[test]
fn reverse_of_a_reversible_geodesic_is_a_geodesic() {
    let c = box_chart(MetricField::Conformal { a: 0.4 }, 1.5);
    let path = geodesic_ivp(&c, &Vector2::new(-0.6, 0.1), &Vector2::new(1.0, 0.3), 1.0).unwrap();
    assert!(geodesic_residual(&c, &path.reversed()).unwrap() < 1e-6);
    // a Randers geodesic reversed is not one
    let r = randers_affine();
    let path = geodesic_ivp(&r, &Vector2::new(-0.6, 0.1), &Vector2::new(1.0, 0.3), 1.0).unwrap();
    let res = geodesic_residual(&r, &path.reversed()).unwrap();
    assert!(res > 1e-5, "{res}");
}

#[test]
fn leaving_the_chart_is_reported() {
    let c = randers_half();
    let err = geodesic_ivp(&c, &Vector2::zeros(), &Vector2::new(1.0, 0.0), 10.0).unwrap_err();
    assert!(matches!(err, ftct_core::Error::ChartExit(..)));
}

#[test]
fn radial_directions_on_euclidean_chart() {
    let c = euclidean();
    let z = Vector2::new(-2.0, 1.0);
    let dirs = radial_direction_set(&c, &z).unwrap();
    assert_eq!(dirs.len(), 1);
    assert!((dirs[0] - z / z.norm()).norm() < 1e-8);
}

/// Initial angle (to the outward meridian) of the geodesic from `(t0, 0)` that
/// returns to radius `t0` on the opposite meridian, by bisection on the
/// dense-shooting oracle.
fn symmetric_angle(t0: f64) -> f64 {
    let f = oracles::gauss_tanh;
    let r = |psi: f64| crossing_radius(&f, t0, psi, PI, 4000, 0.02, 3.0).unwrap_or(0.0) - t0;
    let (mut lo, mut hi) = (0.5, PI / 2.0);
    assert!(r(lo) > 0.0 && r(hi) < 0.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if r(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn based_chart(metric: MetricField, p: Vector2<f64>) -> FinslerChart {
    FinslerChart::new(
        metric,
        ChartDomain::Annulus {
            t_min: POLAR_INNER_RADIUS,
            t_max: 3.0,
        },
        BasePoint::Point(p),
    )
    .unwrap()
}

#[test]
fn radial_directions_beyond_the_cut_point() {
    let p = Vector2::new(1.0, 0.0);
    let z = Vector2::new(1.0, PI);
    let psi = symmetric_angle(1.0);
    let f1 = oracles::gauss_tanh(1.0)[0];
    let model = based_chart(MetricField::revolution(gauss_tanh()), p);
    let mut dirs = radial_direction_set(&model, &z).unwrap();
    assert_eq!(dirs.len(), 2);
    dirs.sort_by(|a, b| a[1].total_cmp(&b[1]));
    assert!(
        (dirs[1] - Vector2::new(-psi.cos(), psi.sin() / f1)).norm() < 1e-4,
        "{dirs:?} {psi}"
    );
    assert!((dirs[0] - Vector2::new(-psi.cos(), -psi.sin() / f1)).norm() < 1e-4);

    // off the cut locus there is a single minimiser
    let single = radial_direction_set(&model, &Vector2::new(1.2, 2.0)).unwrap();
    assert_eq!(single.len(), 1);

    // the mirror symmetry survives a Finsler perturbation
    let perturbed = based_chart(
        MetricField::RevolutionPerturbed {
            surface: Arc::new(gauss_tanh()),
            eps: 0.5,
        },
        p,
    );
    let mut dirs = radial_direction_set(&perturbed, &z).unwrap();
    assert_eq!(dirs.len(), 2, "{dirs:?}");
    dirs.sort_by(|a, b| a[1].total_cmp(&b[1]));
    assert_abs_diff_eq!(dirs[0][0], dirs[1][0], epsilon = 1e-6);
    assert_abs_diff_eq!(dirs[0][1], -dirs[1][1], epsilon = 1e-6);
}
