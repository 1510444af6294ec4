//! Numerical toolkit for comparing Finsler surfaces with surfaces of revolution:
//! Minkowski norms, Finsler charts with their geodesics and curvatures,
//! model surfaces, angle measurement, second-variation machinery and the
//! triangle comparison check.

pub mod angles;
pub mod error;
pub mod jet;
pub mod manifold;
pub mod model_surface;
pub mod norms;
pub mod ode;
pub mod path;
pub mod quad;
pub mod tct;
pub mod variation;

pub use error::{Error, Result};
