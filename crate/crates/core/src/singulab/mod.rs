//! Singularity classes and their numerical extraction: isolated points by
//! seeded Newton, curves by chart-wise marching squares with stitching, fold
//! and cusp loci of maps `S² → R²` and planar maps, and random knots.
//!
//! On S² every extractor works in the six gnomonic cube-face charts of
//! [`ChartAtlas`]; polynomials are evaluated on grid lines through
//! univariate collapses, which keeps dense grids affordable at high degree.

mod atlas;
mod classes;
mod curves;
mod cusps;
mod dump;
mod knots;
mod points;
mod sphere_fn;

pub use atlas::{primary_face, transition, ChartAtlas, CubeFace, DEFAULT_OVERLAP};
pub use classes::{det_derivative, kernel_vector, SingularityClass, MINIMUM_EIGENVALUE};
pub use curves::{
    curve_cell_size, extract_planar_curve, extract_planar_zero_set, extract_zero_curve,
    extract_zero_curve_with, CurveResult, CurveVertex, GridLine, Polyline, FLAT_CELL_FLOOR,
};
pub(crate) use curves::grid_coords;
pub use cusps::{
    cusps_on_fold, extract_fold_curve, extract_planar_fold, find_cusps, find_planar_cusps,
    fold_polynomial, KERNEL_FLOOR,
};
pub use dump::{dump_curves, dump_points, parse_curve_dump};
pub use knots::{
    count_crossings, knot_from_points, min_knot_points, sample_knot, KnotSample, EMBEDDING_FLOOR,
    PROJECTION_RETRIES, TANGENTIAL_ANGLE,
};
pub use points::{
    circle_derivative_polynomial, circle_scan_size, face_coords, find_planar_points,
    find_singular_points, find_zeros_circle, point_grid_spacing, scan_roots,
    sphere_class_points, PointCloudResult, SingularPoint, SphereSearch, ACCEPT_RESIDUAL,
    MAX_CONDITION, MAX_NEWTON_ITERATIONS, NEWTON_TOLERANCE, TANGENCY_FLOOR,
};
pub use sphere_fn::{face_point, FaceLines, SphereFunction, SumFunction};
