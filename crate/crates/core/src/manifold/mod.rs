//! Finsler metrics on a coordinate chart: geodesics, distances and curvature.

mod bvp;
mod chart;
mod curvature;
mod geodesic;
mod metric;

pub use bvp::{
    base_distance, distance, initial_velocity, minimal_geodesic, minimal_geodesic_with,
    radial_direction_set, shoot_from_guess, solve_velocity, symmetrized_distance,
    terminal_directions, BvpOptions, MinimalGeodesics,
};
pub use chart::{BasePoint, ChartDomain, FinslerChart, POLAR_INNER_RADIUS};
pub use curvature::{
    chern_connection, flag_curvature, nonlinear_connection, riemann_operator, tangent_curvature,
};
pub use geodesic::{
    geodesic_endpoint, geodesic_flow, geodesic_ivp, geodesic_residual, GEODESIC_TOL,
};
pub use metric::{CustomMetric, MetricField};

pub(crate) use geodesic::{flow, integrate};
