//! Forward triangles, the hypotheses of the triangle comparison theorem, and
//! its verification against a model surface.

mod hypotheses;
mod sampling;
mod triangle;
mod verify;

pub use hypotheses::{check_hypotheses, HypothesisOptions, HypothesisReport};
pub use sampling::{
    admissible_triangle, tct_batch, tct_sample, write_tct_csv, TctRow, TriangleSampler,
    TCT_CSV_HEADER,
};
pub use triangle::{forward_triangle, measured_edge_length, ForwardTriangle};
pub use verify::{verify_tct, TctMode, TctReport, TctStatus, ANGLE_SLACK};
