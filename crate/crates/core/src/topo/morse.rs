use crate::error::{Error, Result};
use crate::geom::{dot3, norm3, sub3, Vec3};
use crate::rng::SimRng;
use crate::singulab::CurveResult;

/// Segments whose height increment relative to their length is below this
/// floor make the direction degenerate.
pub const DIRECTION_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MorseAudit {
    pub direction: Vec3,
    /// Critical points of the height function on each closed component.
    pub per_component: Vec<usize>,
    pub crit_count: usize,
    pub b0: usize,
    /// `b0 ≤ crit_count / 2` and every per-component count is even.
    pub pass: bool,
}

/// Critical points of `g = ⟨direction, ·⟩` restricted to a union of closed
/// polylines, located as sign changes of the increments of `g` along each
/// polyline.
pub fn morse_audit(curve: &CurveResult, direction: &Vec3) -> Result<MorseAudit> {
    let n = norm3(direction);
    if !(n > 0.0) {
        return Err(Error::invalid("zero audit direction"));
    }
    let dir = [direction[0] / n, direction[1] / n, direction[2] / n];
    let mut per_component = Vec::with_capacity(curve.components.len());
    for (ci, comp) in curve.components.iter().enumerate() {
        if !comp.closed {
            return Err(Error::invalid(format!("component {ci} is not closed")));
        }
        let mut signs = Vec::with_capacity(comp.vertices.len());
        for w in comp.vertices.windows(2) {
            let seg = sub3(&w[1].x, &w[0].x);
            let len = norm3(&seg);
            if len == 0.0 {
                continue;
            }
            let dg = dot3(&dir, &seg);
            if dg.abs() < DIRECTION_FLOOR * len {
                return Err(Error::DegenerateDirection(format!(
                    "segment of component {ci} is orthogonal to the direction"
                )));
            }
            signs.push(dg > 0.0);
        }
        if signs.is_empty() {
            return Err(Error::degenerate(format!("component {ci} has zero length")));
        }
        let k = signs.len();
        let changes = (0..k).filter(|&i| signs[i] != signs[(i + 1) % k]).count();
        per_component.push(changes);
    }
    let crit_count: usize = per_component.iter().sum();
    let b0 = per_component.len();
    let pass = 2 * b0 <= crit_count && per_component.iter().all(|c| c % 2 == 0);
    Ok(MorseAudit {
        direction: dir,
        per_component,
        crit_count,
        b0,
        pass,
    })
}

/// Audit along a uniformly random direction, redrawn on
/// [`Error::DegenerateDirection`] up to `retries` times. Returns the audit
/// and the number of redraws.
pub fn morse_audit_generic(
    curve: &CurveResult,
    seed: u64,
    retries: usize,
) -> Result<(MorseAudit, usize)> {
    let mut rng = SimRng::new(seed);
    let mut last = None;
    for attempt in 0..=retries {
        let v = rng.unit_vector(3);
        let mut dir = [v[0], v[1], v[2]];
        if curve.planar {
            dir[2] = 0.0;
        }
        match morse_audit(curve, &dir) {
            Ok(a) => return Ok((a, attempt)),
            Err(e @ Error::DegenerateDirection(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::DegenerateDirection("no direction drawn".into())))
}
