use crate::error::{Error, Result};
use crate::fields::{default_truncation_order, sample_coupled, Degree, PlanarField};
use crate::geom::{dist3, Vec3};
use crate::rng::{derive_seed, SimRng};

/// Minimum spatial distance required between well-separated samples.
pub const EMBEDDING_FLOOR: f64 = 1e-6;
/// Crossing angle (radians) below which a projection is re-randomized.
pub const TANGENTIAL_ANGLE: f64 = 1e-3;
pub const PROJECTION_RETRIES: usize = 5;

/// Smallest admissible number of samples along a degree-`d` knot.
pub fn min_knot_points(d: u32) -> usize {
    64 * (d as f64).sqrt().ceil() as usize
}

#[derive(Clone, Debug)]
pub struct KnotSample {
    /// Closed polyline; the last point connects to the first.
    pub points: Vec<Vec3>,
    /// Minimum distance between samples separated by more than the
    /// parameter gap.
    pub min_distance: f64,
    pub crossings: usize,
    /// Projections discarded for near-tangential crossings.
    pub retries: usize,
}

/// `k_d(θ) = X_d(cos θ, sin θ)` for the rescaled Kostlan map `R² → R³`,
/// realized as the degree-`d` view of a coupled table keyed by `seed`.
/// The same seed at different `d` gives coupled curves.
pub fn sample_knot(d: u32, n_points: usize, seed: u64) -> Result<KnotSample> {
    if d < 1 {
        return Err(Error::invalid("knot degree must be at least 1"));
    }
    if n_points < min_knot_points(d) {
        return Err(Error::invalid(format!(
            "knot needs at least {} points at d = {d}",
            min_knot_points(d)
        )));
    }
    let pair = sample_coupled(2, 3, default_truncation_order(2), seed)?;
    let view = pair.view(Degree::Finite(d));
    let mut pts = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n_points as f64;
        let v = view.value(&[t.cos(), t.sin()])?;
        pts.push([v[0], v[1], v[2]]);
    }
    let gap = 3.0 / (d as f64).sqrt();
    knot_from_points(pts, gap, seed)
}

/// Audits and projects a closed sampled curve with uniform angular
/// parameters. Pairs closer than `gap` in parameter are exempt from the
/// embedding audit.
pub fn knot_from_points(points: Vec<Vec3>, gap: f64, seed: u64) -> Result<KnotSample> {
    let n = points.len();
    if n < 4 {
        return Err(Error::invalid("knot needs at least four points"));
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let min_sep = (gap / step).ceil() as usize;
    let mut min_distance = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let sep = (j - i).min(n - (j - i));
            if sep <= min_sep {
                continue;
            }
            min_distance = min_distance.min(dist3(&points[i], &points[j]));
        }
    }
    if min_distance <= EMBEDDING_FLOOR {
        return Err(Error::degenerate(format!(
            "embedding audit: distance {min_distance:e}"
        )));
    }
    let mut retries = 0;
    let mut rotation: Option<Vec<Vec<f64>>> = None;
    loop {
        let proj: Vec<[f64; 2]> = points
            .iter()
            .map(|p| match &rotation {
                None => [p[0], p[1]],
                Some(r) => [
                    r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
                    r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
                ],
            })
            .collect();
        match count_crossings(&proj) {
            Some(crossings) => {
                return Ok(KnotSample {
                    points,
                    min_distance,
                    crossings,
                    retries,
                })
            }
            None => {
                retries += 1;
                if retries > PROJECTION_RETRIES {
                    return Err(Error::degenerate("no generic projection after retries"));
                }
                let mut rng = SimRng::new(derive_seed(seed, 0x6b6e_6f74 + retries as u64));
                rotation = Some(rng.orthogonal_matrix(3));
            }
        }
    }
}

fn orient(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Number of proper crossings between non-adjacent edges of a closed planar
/// polygon, or `None` when a crossing is near-tangential or touches a vertex.
pub fn count_crossings(p: &[[f64; 2]]) -> Option<usize> {
    let n = p.len();
    let mut count = 0;
    // Bounding boxes prune most pairs.
    let boxes: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
        })
        .collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            let (a, b) = (&p[i], &p[(i + 1) % n]);
            let (c, d) = (&p[j], &p[(j + 1) % n]);
            let o1 = orient(a, b, c);
            let o2 = orient(a, b, d);
            let o3 = orient(c, d, a);
            let o4 = orient(c, d, b);
            if o1 == 0.0 || o2 == 0.0 || o3 == 0.0 || o4 == 0.0 {
                if (o1 == 0.0 || o2 == 0.0) && (o3 < 0.0) != (o4 < 0.0) {
                    return None;
                }
                if (o3 == 0.0 || o4 == 0.0) && (o1 < 0.0) != (o2 < 0.0) {
                    return None;
                }
                continue;
            }
            if (o1 < 0.0) != (o2 < 0.0) && (o3 < 0.0) != (o4 < 0.0) {
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [d[0] - c[0], d[1] - c[1]];
                let cross = (u[0] * v[1] - u[1] * v[0]).abs();
                let dotp = u[0] * v[0] + u[1] * v[1];
                if cross.atan2(dotp.abs()) < TANGENTIAL_ANGLE {
                    return None;
                }
                count += 1;
            }
        }
    }
    Some(count)
}
