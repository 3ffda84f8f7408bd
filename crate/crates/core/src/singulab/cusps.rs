use std::collections::HashMap;

use nalgebra::DMatrix;

use super::atlas::CubeFace;
use super::classes::{det_derivative, kernel_vector};
use super::curves::{
    curve_cell_size, extract_planar_zero_set, grid_coords, extract_zero_curve_with, CurveResult, CurveVertex,
};
use super::points::{PointCloudResult, SingularPoint};
use super::sphere_fn::FaceLines;
use crate::error::{Error, Result};
use crate::fields::PlanarField;
use crate::geom::{cross3, dot3, norm3, normalize3, Vec3};
use crate::polycore::{HomogeneousPoly, PolynomialMap};

/// Tangential gradient magnitudes below this make the kernel of `dψ`
/// two-dimensional.
pub const KERNEL_FLOOR: f64 = 1e-10;

/// Relative size of `c` at which cusp refinement stops.
const CUSP_REFINE_FLOOR: f64 = 1e-12;

/// `D(x) = x · (∇P₁ × ∇P₂)`, homogeneous of degree `2d − 1`. On S² it equals
/// the determinant of `dψ` in any positively oriented tangent frame.
pub fn fold_polynomial(psi: &PolynomialMap) -> Result<HomogeneousPoly> {
    if psi.m() != 2 || psi.k() != 2 {
        return Err(Error::UnsupportedClass("fold polynomial needs m = k = 2".into()));
    }
    if psi.degree() == 0 {
        return Err(Error::invalid("constant map has no fold"));
    }
    let g1: Vec<HomogeneousPoly> = (0..3).map(|i| psi.component(0).partial(i)).collect();
    let g2: Vec<HomogeneousPoly> = (0..3).map(|i| psi.component(1).partial(i)).collect();
    let mut out = HomogeneousPoly::zero(2, 2 * psi.degree() - 1);
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut cross = g1[j].mul(&g2[k]);
        cross.add_scaled(&g1[k].mul(&g2[j]), -1.0);
        out.add_scaled(&cross.mul_variable(i), 1.0);
    }
    Ok(out)
}

/// Fold curve `{det dψ = 0}` of `ψ: S² → R²`.
pub fn extract_fold_curve(psi: &PolynomialMap) -> Result<(HomogeneousPoly, CurveResult)> {
    let d = fold_polynomial(psi)?;
    let curve = extract_zero_curve_with(&d, curve_cell_size(d.degree()))?;
    Ok((d, curve))
}

/// Line evaluators of `∇D`, `∇P₁`, `∇P₂` on one face grid.
struct FaceGradients<'a> {
    lines: Vec<FaceLines<'a>>,
}

impl FaceGradients<'_> {
    fn eval(&self, v: &CurveVertex) -> [Vec3; 3] {
        let mut out = [[0.0; 3]; 3];
        for (g, o) in out.iter_mut().enumerate() {
            for c in 0..3 {
                let l = &self.lines[3 * g + c];
                o[c] = if v.line.row {
                    l.along_row(v.line.index, v.line.param)
                } else {
                    l.along_col(v.line.index, v.line.param)
                };
            }
        }
        out
    }
}

/// Unit-scale kernel direction `x × ∇P_j` for the component with the larger
/// tangential gradient; `grads` are positive multiples of the gradients at `x`.
fn kernel_direction(x: &Vec3, g1: &Vec3, g2: &Vec3, scale: f64) -> Result<Vec3> {
    let v1 = cross3(x, g1);
    let v2 = cross3(x, g2);
    let (n1, n2) = (norm3(&v1), norm3(&v2));
    if n1.max(n2) * scale < KERNEL_FLOOR {
        return Err(Error::degenerate("dψ vanishes on the fold"));
    }
    Ok(if n1 >= n2 { normalize3(&v1) } else { normalize3(&v2) })
}

/// `D(x)`, its ambient gradient and `∇P₁`, `∇P₂`, all from one order-2 jet
/// of `ψ`: `∂_i D = e_i·(∇P₁×∇P₂) + x·(H₁e_i×∇P₂) + x·(∇P₁×H₂e_i)`.
fn fold_value_grad(psi: &PolynomialMap, x: &Vec3) -> (f64, Vec3, Vec3, Vec3) {
    let j = psi.ambient_jets(x, 2);
    let g1 = crate::geom::to_vec3(&j[0].gradient);
    let g2 = crate::geom::to_vec3(&j[1].gradient);
    let cross = cross3(&g1, &g2);
    let col = |h: &[f64], i: usize| [h[i], h[3 + i], h[6 + i]];
    let mut grad = [0.0; 3];
    for (i, gi) in grad.iter_mut().enumerate() {
        let h1 = col(&j[0].hessian, i);
        let h2 = col(&j[1].hessian, i);
        *gi = cross[i] + dot3(x, &cross3(&h1, &g2)) + dot3(x, &cross3(&g1, &h2));
    }
    (dot3(x, &cross), grad, g1, g2)
}

fn tangential(g: &Vec3, x: &Vec3) -> Vec3 {
    let r = dot3(g, x);
    [g[0] - r * x[0], g[1] - r * x[1], g[2] - r * x[2]]
}

/// Newton projection of a unit vector onto `{D = 0}` along `∇_T D`, followed
/// by `c = ∇_T D · v` at the projected point with `v` the unit kernel vector.
fn project_and_measure(psi: &PolynomialMap, mut x: Vec3) -> Result<(Vec3, f64, Vec3)> {
    for _ in 0..4 {
        let (value, g, _, _) = fold_value_grad(psi, &x);
        let gt = tangential(&g, &x);
        let n2 = dot3(&gt, &gt);
        if n2 == 0.0 || value == 0.0 {
            break;
        }
        let s = value / n2;
        x = normalize3(&[x[0] - s * gt[0], x[1] - s * gt[1], x[2] - s * gt[2]]);
        if (s * n2.sqrt()).abs() < 1e-15 {
            break;
        }
    }
    let (_, g, g1, g2) = fold_value_grad(psi, &x);
    let v = kernel_direction(&x, &g1, &g2, 1.0)?;
    Ok((x, dot3(&tangential(&g, &x), &v), v))
}

/// Whitney cusps of `ψ: S² → R²`: sign changes of `c = D_v det dψ` along the
/// fold with `v` a unit kernel vector carried continuously along each
/// component, refined on the chord between the bracketing vertices.
pub fn find_cusps(psi: &PolynomialMap) -> Result<PointCloudResult> {
    let (dpoly, fold) = extract_fold_curve(psi)?;
    cusps_on_fold(psi, &dpoly, &fold)
}

pub fn cusps_on_fold(
    psi: &PolynomialMap,
    dpoly: &HomogeneousPoly,
    fold: &CurveResult,
) -> Result<PointCloudResult> {
    let h = fold.cell_size;
    let coords = grid_coords(1.0, h);
    let polys: Vec<HomogeneousPoly> = (0..3)
        .map(|i| dpoly.partial(i))
        .chain((0..3).map(|i| psi.component(0).partial(i)))
        .chain((0..3).map(|i| psi.component(1).partial(i)))
        .collect();
    let mut face_grads: HashMap<usize, FaceGradients> = HashMap::new();
    let d = psi.degree() as i32;
    let mut points = Vec::new();
    for comp in &fold.components {
        let verts = comp.distinct();
        if verts.len() < 2 {
            continue;
        }
        let mut cs = Vec::with_capacity(verts.len());
        let mut vs: Vec<Vec3> = Vec::with_capacity(verts.len());
        for vert in verts {
            let grads = face_grads.entry(vert.chart).or_insert_with(|| {
                let face = CubeFace::from_id(vert.chart);
                FaceGradients {
                    lines: polys.iter().map(|p| FaceLines::new(p, face, &coords)).collect(),
                }
            });
            let [gd, g1, g2] = grads.eval(vert);
            // Line evaluations are at the unnormalized chart point y = λx.
            let lambda = {
                let face = CubeFace::from_id(vert.chart);
                let (a, b) = face.chart_coords(&vert.x).unwrap_or((0.0, 0.0));
                (1.0 + a * a + b * b).sqrt()
            };
            let mut v = kernel_direction(&vert.x, &g1, &g2, lambda.powi(-(d - 1)))?;
            if let Some(prev) = vs.last() {
                if dot3(prev, &v) < 0.0 {
                    v = [-v[0], -v[1], -v[2]];
                }
            }
            cs.push(dot3(&gd, &v));
            vs.push(v);
        }
        let nv = verts.len();
        let segs = if comp.closed { nv } else { nv - 1 };
        for s in 0..segs {
            let t = (s + 1) % nv;
            let flip = if t == 0 && dot3(&vs[s], &vs[0]) < 0.0 { -1.0 } else { 1.0 };
            let (c0, c1) = (cs[s], flip * cs[t]);
            if (c0 < 0.0) == (c1 < 0.0) {
                continue;
            }
            points.push(refine_cusp(psi, dpoly, &verts[s].x, &verts[t].x, &vs[s], c0, c1)?);
        }
    }
    Ok(PointCloudResult {
        seeds: points.len(),
        points,
        dedup_radius: 0.0,
        merged: 0,
        max_condition: 1.0,
        near_tangencies: 0,
    })
}

fn refine_cusp(
    psi: &PolynomialMap,
    dpoly: &HomogeneousPoly,
    p: &Vec3,
    q: &Vec3,
    v_ref: &Vec3,
    c0: f64,
    c1: f64,
) -> Result<SingularPoint> {
    let eval = |t: f64| -> Result<(Vec3, f64)> {
        let y = [
            (1.0 - t) * p[0] + t * q[0],
            (1.0 - t) * p[1] + t * q[1],
            (1.0 - t) * p[2] + t * q[2],
        ];
        let (x, c, v) = project_and_measure(psi, normalize3(&y))?;
        let s = if dot3(&v, v_ref) < 0.0 { -1.0 } else { 1.0 };
        Ok((x, s * c))
    };
    // Vertex values come from chart-scaled line tables; the secant needs
    // both ends on the unit-sphere scale of `eval`.
    let (_, e0) = eval(0.0)?;
    let (_, e1) = eval(1.0)?;
    let secant = (e0 < 0.0) == (c0 < 0.0) && (e1 < 0.0) == (c1 < 0.0);
    let (c0, c1) = if secant { (e0, e1) } else { (c0, c1) };
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut flo, mut fhi) = (c0, c1);
    let mut best = if c0.abs() < c1.abs() { (0.0, c0) } else { (1.0, c1) };
    let mut iterations = 0;
    let mut side = 0;
    // Evaluations below this are at the rounding level of the projection.
    let floor = if secant { CUSP_REFINE_FLOOR * c0.abs().max(c1.abs()) } else { 0.0 };
    while hi - lo > 1e-10 && iterations < 60 {
        iterations += 1;
        let mut t = if secant { (lo * fhi - hi * flo) / (fhi - flo) } else { 0.5 * (lo + hi) };
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let (_, ft) = eval(t)?;
        if ft.abs() < best.1.abs() {
            best = (t, ft);
        }
        if ft.abs() <= floor {
            break;
        }
        if (ft < 0.0) == (flo < 0.0) {
            lo = t;
            flo = ft;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            fhi = ft;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    let (x, c) = eval(best.0)?;
    let dval = dpoly.eval(&x);
    Ok(SingularPoint {
        x: x.to_vec(),
        chart: super::atlas::primary_face(&x).id(),
        residual: (dval * dval + c * c).sqrt(),
        iterations,
        condition: 1.0,
    })
}

/// Jacobian, Hessians, determinant and determinant gradient of a planar map.
fn planar_fold_jet(field: &dyn PlanarField, u: &[f64]) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>, f64, [f64; 2])> {
    let j = field.jet(u, 2)?;
    let g = j.gradient;
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let grad = [
        det_derivative(&g, &j.hessian, &[1.0, 0.0]),
        det_derivative(&g, &j.hessian, &[0.0, 1.0]),
    ];
    Ok((g, j.hessian, det, grad))
}

/// Fold curve of a planar map `R² → R²` on the square `[-half, half]²`.
pub fn extract_planar_fold(field: &dyn PlanarField, half: f64, h: f64) -> Result<CurveResult> {
    if field.dim() != 2 || field.codim() != 2 {
        return Err(Error::UnsupportedClass("planar fold needs m = k = 2".into()));
    }
    extract_planar_zero_set(
        |a, b| {
            field
                .jet(&[a, b], 1)
                .map(|j| {
                    let g = j.gradient;
                    g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]
                })
                .unwrap_or(f64::NAN)
        },
        half,
        h,
    )
}

/// Cusps of a planar map in the disk `|u| ≤ radius`.
pub fn find_planar_cusps(field: &dyn PlanarField, radius: f64, h: f64) -> Result<PointCloudResult> {
    let half = radius + 2.0 * h;
    let fold = extract_planar_fold(field, half, h)?;
    let indicator = |u: &[f64], vref: Option<[f64; 2]>| -> Result<([f64; 2], f64)> {
        let (g, hess, _, _) = planar_fold_jet(field, u)?;
        let mut v = kernel_vector(&g)?;
        if let Some(r) = vref {
            if v[0] * r[0] + v[1] * r[1] < 0.0 {
                v = [-v[0], -v[1]];
            }
        }
        Ok((v, det_derivative(&g, &hess, &v)))
    };
    let project = |mut u: [f64; 2]| -> Result<[f64; 2]> {
        for _ in 0..6 {
            let (_, _, det, gr) = planar_fold_jet(field, &u)?;
            let n2 = gr[0] * gr[0] + gr[1] * gr[1];
            if n2 == 0.0 || det == 0.0 {
                break;
            }
            u = [u[0] - det * gr[0] / n2, u[1] - det * gr[1] / n2];
            if det.abs() < 1e-14 {
                break;
            }
        }
        Ok(u)
    };
    let mut points = Vec::new();
    for comp in &fold.components {
        let verts = comp.distinct();
        if verts.len() < 2 {
            continue;
        }
        let mut data: Vec<([f64; 2], f64)> = Vec::with_capacity(verts.len());
        for v in verts {
            let prev = data.last().map(|d| d.0);
            data.push(indicator(&[v.x[0], v.x[1]], prev)?);
        }
        let nv = verts.len();
        let segs = if comp.closed { nv } else { nv - 1 };
        for s in 0..segs {
            let t = (s + 1) % nv;
            let (vs, c0) = data[s];
            let (vt, ct) = data[t];
            let flip = if vs[0] * vt[0] + vs[1] * vt[1] < 0.0 { -1.0 } else { 1.0 };
            let c1 = flip * ct;
            if (c0 < 0.0) == (c1 < 0.0) {
                continue;
            }
            let p = [verts[s].x[0], verts[s].x[1]];
            let q = [verts[t].x[0], verts[t].x[1]];
            let (mut lo, mut hi) = (0.0, 1.0);
            let mut flo = c0;
            let mut iterations = 0;
            while hi - lo > 1e-10 && iterations < 60 {
                iterations += 1;
                let m = 0.5 * (lo + hi);
                let u = project([p[0] + m * (q[0] - p[0]), p[1] + m * (q[1] - p[1])])?;
                let (_, fm) = indicator(&u, Some(vs))?;
                if (fm < 0.0) == (flo < 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            let m = 0.5 * (lo + hi);
            let u = project([p[0] + m * (q[0] - p[0]), p[1] + m * (q[1] - p[1])])?;
            if u[0] * u[0] + u[1] * u[1] > radius * radius {
                continue;
            }
            let (_, _, det, _) = planar_fold_jet(field, &u)?;
            let (_, c) = indicator(&u, Some(vs))?;
            points.push(SingularPoint {
                x: u.to_vec(),
                chart: 0,
                residual: (det * det + c * c).sqrt(),
                iterations,
                condition: 1.0,
            });
        }
    }
    Ok(PointCloudResult {
        seeds: points.len(),
        points,
        dedup_radius: 0.0,
        merged: 0,
        max_condition: 1.0,
        near_tangencies: 0,
    })
}
