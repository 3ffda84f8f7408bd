use nalgebra::DMatrix;

use super::atlas::{primary_face, CubeFace, DEFAULT_OVERLAP};
use super::classes::SingularityClass;
use super::sphere_fn::FaceLines;
use crate::error::{Error, Result};
use crate::fields::PlanarField;
use crate::geom::{dot, geodesic, norm, normalize3, tangent_frame, to_vec3, Vec3};
use crate::polycore::{spherical_jet, HomogeneousPoly, PolynomialMap};

/// Residual norm below which Newton stops.
pub const NEWTON_TOLERANCE: f64 = 1e-12;
/// Residual norm required for a point to be accepted.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 60;
/// Jacobian condition number above which a sample is rejected as degenerate.
pub const MAX_CONDITION: f64 = 1e8;
/// `|f|` at a circle scan node below which tangency is suspected.
pub const TANGENCY_FLOOR: f64 = 1e-13;
/// Bisection width for circle and interval roots.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

/// Offset of periodic scans, in steps.
const SCAN_PHASE: f64 = 0.318_309_886_183_790_7;

/// Point-grid spacing for a field with feature scale `bandwidth^{-1/2}`.
pub fn point_grid_spacing(bandwidth: f64) -> f64 {
    (1.0 / (8.0 * bandwidth.max(1.0).sqrt())).min(0.08)
}

/// Number of circle scan nodes at degree `d`.
pub fn circle_scan_size(d: u32) -> usize {
    1024 + 64 * (d as f64).sqrt().ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    /// Unit vector on the sphere, or a point of the disk.
    pub x: Vec<f64>,
    pub chart: usize,
    pub residual: f64,
    pub iterations: usize,
    pub condition: f64,
}

#[derive(Clone, Debug, Default)]
pub struct PointCloudResult {
    pub points: Vec<SingularPoint>,
    pub dedup_radius: f64,
    pub seeds: usize,
    pub merged: usize,
    pub max_condition: f64,
    /// Number of scan nodes where the tangency audit came close to firing
    /// (`|f| < 1e3 · floor`).
    pub near_tangencies: usize,
}

impl PointCloudResult {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Roots of `f` on `[lo, hi]` from a uniform `n`-node sign scan refined by
/// bisection. Fails as degenerate when a node value is below the tangency
/// floor. Periodic scans treat `hi` as `lo`.
pub fn scan_roots<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    periodic: bool,
) -> Result<(Vec<f64>, usize)> {
    let step = (hi - lo) / n as f64;
    // Periodic scans start at an irrational fraction of a step so that
    // symmetric inputs do not place roots on nodes.
    let lo = if periodic { lo + SCAN_PHASE * step } else { lo };
    let nodes = if periodic { n } else { n + 1 };
    let vals: Vec<f64> = (0..nodes).map(|i| f(lo + i as f64 * step)).collect();
    let mut near = 0;
    for (i, v) in vals.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::degenerate("non-finite value on scan"));
        }
        if v.abs() < TANGENCY_FLOOR {
            return Err(Error::degenerate(format!(
                "|f| = {:e} at scan node {i}",
                v.abs()
            )));
        }
        if v.abs() < 1e3 * TANGENCY_FLOOR {
            near += 1;
        }
    }
    let mut roots = Vec::new();
    for i in 0..n {
        let (fa, fb) = (vals[i], vals[(i + 1) % nodes]);
        if (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        let mut a = lo + i as f64 * step;
        let mut b = a + step;
        let mut sa = fa < 0.0;
        while b - a > BISECTION_TOLERANCE {
            let c = 0.5 * (a + b);
            if c <= a || c >= b {
                break;
            }
            let fc = f(c);
            if fc == 0.0 {
                a = c;
                b = c;
                break;
            }
            if (fc < 0.0) == sa {
                a = c;
                sa = fc < 0.0;
            } else {
                b = c;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok((roots, near))
}

fn circle_points(
    p: &HomogeneousPoly,
    scan_degree: u32,
) -> Result<(Vec<SingularPoint>, usize)> {
    let f = |t: f64| p.eval(&[t.cos(), t.sin()]);
    let (angles, near) = scan_roots(
        f,
        0.0,
        2.0 * std::f64::consts::PI,
        circle_scan_size(scan_degree),
        true,
    )?;
    let pts = angles
        .into_iter()
        .map(|t| SingularPoint {
            x: vec![t.cos(), t.sin()],
            chart: 0,
            residual: f(t).abs(),
            iterations: 0,
            condition: 1.0,
        })
        .collect();
    Ok((pts, near))
}

/// Simple zeros on S¹ of a scalar map of type `(d, 1, 1)`.
pub fn find_zeros_circle(f: &PolynomialMap) -> Result<PointCloudResult> {
    if f.m() != 1 || f.k() != 1 {
        return Err(Error::invalid("find_zeros_circle needs m = k = 1"));
    }
    let p = f.component(0);
    if p.coefficients().iter().all(|&c| c == 0.0) {
        return Err(Error::invalid("identically zero polynomial"));
    }
    let (points, near) = circle_points(p, p.degree())?;
    Ok(PointCloudResult {
        seeds: points.len(),
        points,
        dedup_radius: 0.0,
        merged: 0,
        max_condition: 1.0,
        near_tangencies: near,
    })
}

/// `x0 ∂1P − x1 ∂0P`, whose zeros on S¹ are the critical points of `P|S¹`.
pub fn circle_derivative_polynomial(p: &HomogeneousPoly) -> HomogeneousPoly {
    let mut q = p.partial(1).mul_variable(0);
    q.add_scaled(&p.partial(0).mul_variable(1), -1.0);
    q
}

/// Isolated points of a codimension-m class for `ψ` restricted to `S^m`,
/// `m ∈ {1, 2}`.
pub fn find_singular_points(
    psi: &PolynomialMap,
    class: SingularityClass,
) -> Result<PointCloudResult> {
    let m = psi.m();
    class.validate(m, psi.k())?;
    if class.codim(m) != m {
        return Err(Error::UnsupportedClass(format!(
            "{} is not a point class for m = {m}",
            class.name()
        )));
    }
    match (m, class) {
        (_, SingularityClass::CuspPoints) => super::cusps::find_cusps(psi),
        (1, _) => circle_class_points(psi, class),
        (2, _) => sphere_class_points(psi, class, &SphereSearch::for_degree(psi.degree())),
        _ => Err(Error::UnsupportedClass(format!("m = {m} is not supported"))),
    }
}

fn circle_class_points(psi: &PolynomialMap, class: SingularityClass) -> Result<PointCloudResult> {
    let p = psi.component(0);
    let (mut points, near) = match class {
        SingularityClass::ZeroSet(1) => circle_points(p, p.degree())?,
        _ => {
            if p.degree() == 0 {
                return Err(Error::degenerate("constant function has no isolated critical points"));
            }
            circle_points(&circle_derivative_polynomial(p), p.degree())?
        }
    };
    let seeds = points.len();
    if class == SingularityClass::Minima {
        let mut kept = Vec::new();
        for pt in points {
            let jet = spherical_jet(psi, &pt.x, 2)?;
            if class.accepts(&jet.hessian) {
                kept.push(pt);
            }
        }
        points = kept;
    }
    Ok(PointCloudResult {
        points,
        dedup_radius: 0.0,
        seeds,
        merged: 0,
        max_condition: 1.0,
        near_tangencies: near,
    })
}

/// Grid and tolerance settings for point search on S².
#[derive(Clone, Copy, Debug)]
pub struct SphereSearch {
    pub spacing: f64,
    pub overlap: f64,
    pub dedup_radius: f64,
}

impl SphereSearch {
    pub fn for_degree(d: u32) -> Self {
        Self::with_spacing(point_grid_spacing(d as f64))
    }

    pub fn with_spacing(h: f64) -> Self {
        Self {
            spacing: h,
            overlap: DEFAULT_OVERLAP,
            dedup_radius: h / 4.0,
        }
    }
}

/// Residual and frame Jacobian of a point class at a unit vector.
fn sphere_residual(
    psi: &PolynomialMap,
    class: SingularityClass,
    x: &[f64],
) -> (Vec<f64>, DMatrix<f64>) {
    let order = if class == SingularityClass::ZeroSet(2) { 1 } else { 2 };
    let jets = psi.ambient_jets(x, order);
    let frame = tangent_frame(x);
    match class {
        SingularityClass::ZeroSet(_) => {
            let f = jets.iter().map(|j| j.value).collect();
            let jac = DMatrix::from_fn(jets.len(), 2, |i, a| dot(&jets[i].gradient, &frame[a]));
            (f, jac)
        }
        _ => {
            let j = &jets[0];
            let n = x.len();
            let radial = dot(x, &j.gradient);
            let f = frame.iter().map(|e| dot(&j.gradient, e)).collect();
            let jac = DMatrix::from_fn(2, 2, |a, b| {
                let mut s = 0.0;
                for r in 0..n {
                    for c in 0..n {
                        s += frame[a][r] * j.hessian[r * n + c] * frame[b][c];
                    }
                }
                s - radial * dot(&frame[a], &frame[b])
            });
            (f, jac)
        }
    }
}

fn solve2(j: &DMatrix<f64>, f: &[f64]) -> Option<[f64; 2]> {
    let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (j[(1, 1)] * f[0] - j[(0, 1)] * f[1]) / det,
        (-j[(1, 0)] * f[0] + j[(0, 0)] * f[1]) / det,
    ])
}

fn condition_number(j: &DMatrix<f64>) -> f64 {
    let s = j.clone().singular_values();
    let (lo, hi) = (s.min(), s.max());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Damped Riemannian Newton on S² with the normalize retraction.
fn newton_sphere(
    psi: &PolynomialMap,
    class: SingularityClass,
    x0: Vec3,
    max_step: f64,
) -> Option<SingularPoint> {
    let mut x = x0;
    let (mut f, mut jac) = sphere_residual(psi, class, &x);
    let mut r = norm(&f);
    let mut it = 0;
    while it < MAX_NEWTON_ITERATIONS && r >= NEWTON_TOLERANCE {
        it += 1;
        let step = solve2(&jac, &f)?;
        let frame = tangent_frame(&x);
        let mut t = 1.0;
        let len = (step[0] * step[0] + step[1] * step[1]).sqrt();
        if len * t > max_step {
            t = max_step / len;
        }
        let mut accepted = false;
        for _ in 0..12 {
            let mut y = x;
            for (c, yc) in y.iter_mut().enumerate() {
                *yc -= t * (step[0] * frame[0][c] + step[1] * frame[1][c]);
            }
            let y = normalize3(&y);
            let (fy, jy) = sphere_residual(psi, class, &y);
            let ry = norm(&fy);
            if ry < r || ry < NEWTON_TOLERANCE {
                x = y;
                f = fy;
                jac = jy;
                r = ry;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || len * t < 1e-16 {
            break;
        }
    }
    if r >= ACCEPT_RESIDUAL {
        return None;
    }
    Some(SingularPoint {
        x: x.to_vec(),
        chart: primary_face(&x).id(),
        residual: r,
        iterations: it,
        condition: condition_number(&jac),
    })
}

/// Cell-centre and local-minimum seeds on one face grid for the residual
/// components `res` (each row-major `n × n`).
fn grid_seeds(res: &[Vec<f64>], n: usize) -> Vec<(f64, f64)> {
    let mut seeds = Vec::new();
    // Cells where every component changes sign.
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let all = res.iter().all(|r| {
                let c = [
                    r[i * n + j],
                    r[(i + 1) * n + j],
                    r[i * n + j + 1],
                    r[(i + 1) * n + j + 1],
                ];
                let neg = c.iter().filter(|v| **v < 0.0).count();
                neg != 0 && neg != 4
            });
            if all {
                seeds.push((i as f64 + 0.5, j as f64 + 0.5));
            }
        }
    }
    // Discrete local minima of the residual norm.
    let norm2 = |i: usize, j: usize| res.iter().map(|r| r[i * n + j].powi(2)).sum::<f64>();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let c = norm2(i, j);
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let v = norm2((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    if v < c {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((i as f64, j as f64));
            }
        }
    }
    seeds
}

/// Grid coordinates covering `[-(1 + overlap), 1 + overlap]` at spacing `h`.
pub fn face_coords(h: f64, overlap: f64) -> Vec<f64> {
    let half = 1.0 + overlap;
    let cells = (2.0 * half / h).ceil() as usize;
    (0..=cells)
        .map(|i| -half + 2.0 * half * i as f64 / cells as f64)
        .collect()
}

/// Points of a codimension-2 class on S² by face-grid seeding and Newton.
pub fn sphere_class_points(
    psi: &PolynomialMap,
    class: SingularityClass,
    search: &SphereSearch,
) -> Result<PointCloudResult> {
    if psi.m() != 2 {
        return Err(Error::invalid("sphere point search needs m = 2"));
    }
    let coords = face_coords(search.spacing, search.overlap);
    let n = coords.len();
    let d = psi.degree() as f64;
    let mut seeds: Vec<Vec3> = Vec::new();
    for face in CubeFace::all() {
        let res: Vec<Vec<f64>> = match class {
            SingularityClass::ZeroSet(_) => psi
                .components()
                .iter()
                .map(|p| FaceLines::new(p, face, &coords).node_values())
                .collect(),
            _ => {
                let p = psi.component(0);
                let (ia, ib) = face.chart_axes();
                let vp = FaceLines::new(p, face, &coords).node_values();
                let pa = p.partial(ia);
                let pb = p.partial(ib);
                let va = FaceLines::new(&pa, face, &coords).node_values();
                let vb = FaceLines::new(&pb, face, &coords).node_values();
                let mut ra = vec![0.0; n * n];
                let mut rb = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = (coords[i], coords[j]);
                        let sq = (1.0 + a * a + b * b).sqrt();
                        let k = i * n + j;
                        ra[k] = va[k] - d * a * vp[k] / sq;
                        rb[k] = vb[k] - d * b * vp[k] / sq;
                    }
                }
                vec![ra, rb]
            }
        };
        let step = coords[1] - coords[0];
        for (si, sj) in grid_seeds(&res, n) {
            let a = coords[0] + si * step;
            let b = coords[0] + sj * step;
            seeds.push(face.to_sphere(a, b));
        }
    }
    let max_step = 0.25;
    let mut found: Vec<SingularPoint> = Vec::new();
    for s in &seeds {
        if let Some(p) = newton_sphere(psi, class, *s, max_step) {
            found.push(p);
        }
    }
    let (mut points, merged) = dedup_sphere(found, search.dedup_radius);
    let max_condition = points.iter().map(|p| p.condition).fold(0.0, f64::max);
    if max_condition > MAX_CONDITION {
        return Err(Error::degenerate(format!(
            "transversality audit: condition number {max_condition:e}"
        )));
    }
    if class == SingularityClass::Minima {
        let mut kept = Vec::new();
        for p in points {
            let jet = spherical_jet(psi, &p.x, 2)?;
            if class.accepts(&jet.hessian) {
                kept.push(p);
            }
        }
        points = kept;
    }
    Ok(PointCloudResult {
        points,
        dedup_radius: search.dedup_radius,
        seeds: seeds.len(),
        merged,
        max_condition,
        near_tangencies: 0,
    })
}

fn dedup_sphere(mut found: Vec<SingularPoint>, radius: f64) -> (Vec<SingularPoint>, usize) {
    found.sort_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap());
    let mut kept: Vec<SingularPoint> = Vec::new();
    let mut merged = 0;
    for p in found {
        let x = to_vec3(&p.x);
        if kept.iter().any(|q| geodesic(&x, &to_vec3(&q.x)) < radius) {
            merged += 1;
        } else {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| u.partial_cmp(v).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    (kept, merged)
}

/// Residual of a point class for a planar field and its Jacobian.
fn planar_residual(
    field: &dyn PlanarField,
    class: SingularityClass,
    u: &[f64],
) -> Result<(Vec<f64>, DMatrix<f64>, Vec<DMatrix<f64>>)> {
    match class {
        SingularityClass::ZeroSet(_) => {
            let j = field.jet(u, 1)?;
            Ok((j.value, j.gradient, Vec::new()))
        }
        _ => {
            let j = field.jet(u, 2)?;
            let f = j.gradient.row(0).iter().copied().collect();
            let h = j.hessian[0].clone();
            Ok((f, h, j.hessian))
        }
    }
}

/// Isolated points of a codimension-m class for a planar field on the disk
/// `|u| ≤ radius`, `m ∈ {1, 2}`, seeded on a grid of spacing `h`.
pub fn find_planar_points(
    field: &dyn PlanarField,
    class: SingularityClass,
    radius: f64,
    h: f64,
) -> Result<PointCloudResult> {
    let m = field.dim();
    class.validate(m, field.codim())?;
    if class.codim(m) != m {
        return Err(Error::UnsupportedClass(format!(
            "{} is not a point class for m = {m}",
            class.name()
        )));
    }
    if class == SingularityClass::CuspPoints {
        return super::cusps::find_planar_cusps(field, radius, h);
    }
    match m {
        1 => planar_points_1d(field, class, radius, h),
        2 => planar_points_2d(field, class, radius, h),
        _ => Err(Error::UnsupportedClass(format!("m = {m} is not supported"))),
    }
}

fn planar_points_1d(
    field: &dyn PlanarField,
    class: SingularityClass,
    radius: f64,
    h: f64,
) -> Result<PointCloudResult> {
    let n = (2.0 * radius / h).ceil() as usize;
    let eval = |t: f64| -> f64 {
        let r = match class {
            SingularityClass::ZeroSet(_) => field.value(&[t]).map(|v| v[0]),
            _ => field.jet(&[t], 1).map(|j| j.gradient[(0, 0)]),
        };
        r.unwrap_or(f64::NAN)
    };
    let (roots, near) = scan_roots(eval, -radius, radius, n, false)?;
    let mut points = Vec::new();
    for t in roots {
        let jet = field.jet(&[t], 2)?;
        if !class.accepts(&jet.hessian) {
            continue;
        }
        points.push(SingularPoint {
            x: vec![t],
            chart: 0,
            residual: eval(t).abs(),
            iterations: 0,
            condition: 1.0,
        });
    }
    Ok(PointCloudResult {
        seeds: points.len(),
        points,
        dedup_radius: 0.0,
        merged: 0,
        max_condition: 1.0,
        near_tangencies: near,
    })
}

fn planar_points_2d(
    field: &dyn PlanarField,
    class: SingularityClass,
    radius: f64,
    h: f64,
) -> Result<PointCloudResult> {
    let half = radius + h;
    let cells = (2.0 * half / h).ceil() as usize;
    let n = cells + 1;
    let coord = |i: f64| -half + 2.0 * half * i / cells as f64;
    let mut res = vec![vec![0.0; n * n]; 2];
    for i in 0..n {
        for j in 0..n {
            let (f, _, _) = planar_residual(field, class, &[coord(i as f64), coord(j as f64)])?;
            res[0][i * n + j] = f[0];
            res[1][i * n + j] = f[1];
        }
    }
    let seeds = grid_seeds(&res, n);
    let mut found = Vec::new();
    for &(si, sj) in &seeds {
        let mut u = [coord(si), coord(sj)];
        let (mut f, mut jac, _) = planar_residual(field, class, &u)?;
        let mut r = norm(&f);
        let mut it = 0;
        while it < MAX_NEWTON_ITERATIONS && r >= NEWTON_TOLERANCE {
            it += 1;
            let Some(step) = solve2(&jac, &f) else { break };
            let len = (step[0] * step[0] + step[1] * step[1]).sqrt();
            let mut t = if len > 4.0 * h { 4.0 * h / len } else { 1.0 };
            let mut accepted = false;
            for _ in 0..12 {
                let v = [u[0] - t * step[0], u[1] - t * step[1]];
                if norm(&v) <= 2.0 * half {
                    let (fv, jv, _) = planar_residual(field, class, &v)?;
                    let rv = norm(&fv);
                    if rv < r || rv < NEWTON_TOLERANCE {
                        u = v;
                        f = fv;
                        jac = jv;
                        r = rv;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if r < ACCEPT_RESIDUAL && norm(&u) <= radius {
            found.push(SingularPoint {
                x: u.to_vec(),
                chart: 0,
                residual: r,
                iterations: it,
                condition: condition_number(&jac),
            });
        }
    }
    found.sort_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap());
    let mut points: Vec<SingularPoint> = Vec::new();
    let mut merged = 0;
    let radius_dedup = h / 4.0;
    for p in found {
        if points.iter().any(|q| {
            let dx = q.x[0] - p.x[0];
            let dy = q.x[1] - p.x[1];
            (dx * dx + dy * dy).sqrt() < radius_dedup
        }) {
            merged += 1;
        } else {
            points.push(p);
        }
    }
    let max_condition = points.iter().map(|p| p.condition).fold(0.0, f64::max);
    if max_condition > MAX_CONDITION {
        return Err(Error::degenerate(format!(
            "transversality audit: condition number {max_condition:e}"
        )));
    }
    if class == SingularityClass::Minima {
        let mut kept = Vec::new();
        for p in points {
            let (_, _, hess) = planar_residual(field, class, &p.x)?;
            if class.accepts(&hess) {
                kept.push(p);
            }
        }
        points = kept;
    }
    Ok(PointCloudResult {
        points,
        dedup_radius: radius_dedup,
        seeds: seeds.len(),
        merged,
        max_condition,
        near_tangencies: 0,
    })
}
