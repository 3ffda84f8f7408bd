use std::collections::HashMap;

use super::atlas::CubeFace;
use super::sphere_fn::{FaceLines, SphereFunction};
use crate::error::{Error, Result};
use crate::fields::PlanarField;
use crate::geom::{dist3, Vec3};

/// Corner values below this magnitude in all four corners of a cell make the
/// sample degenerate.
pub const FLAT_CELL_FLOOR: f64 = 1e-13;

/// Marching-squares cell size for a function of degree `d` on S².
pub fn curve_cell_size(d: u32) -> f64 {
    (1.0 / (8.0 * (d.max(1) as f64).sqrt())).min(0.05)
}

/// Position of a curve vertex on a grid line of its chart: row `index`
/// (`a = coords[index]`, parameter `b`) or column `index` (`b = coords[index]`,
/// parameter `a`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridLine {
    pub row: bool,
    pub index: usize,
    pub param: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveVertex {
    /// Unit vector on S², or `(u1, u2, 0)` for planar curves.
    pub x: Vec3,
    pub chart: usize,
    pub line: GridLine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    /// For closed polylines the last vertex repeats the first.
    pub vertices: Vec<CurveVertex>,
    pub closed: bool,
}

impl Polyline {
    pub fn points(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|v| v.x).collect()
    }

    /// Vertices without the closing repeat.
    pub fn distinct(&self) -> &[CurveVertex] {
        if self.closed && self.vertices.len() > 1 {
            &self.vertices[..self.vertices.len() - 1]
        } else {
            &self.vertices
        }
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| dist3(&w[0].x, &w[1].x)).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct CurveResult {
    pub components: Vec<Polyline>,
    pub cell_size: f64,
    /// Fragments produced by the per-chart tracers before stitching.
    pub fragments: usize,
    /// Pairs of fragment endpoints joined across chart boundaries.
    pub stitches: usize,
    /// Planar curves live in a disk chart; otherwise on S².
    pub planar: bool,
}

impl CurveResult {
    pub fn closed_count(&self) -> usize {
        self.components.iter().filter(|c| c.closed).count()
    }
}

/// Sampling interface of one chart grid for the tracer.
trait GridSource {
    fn along_row(&self, i: usize, b: f64) -> f64;
    fn along_col(&self, j: usize, a: f64) -> f64;
    fn at(&self, a: f64, b: f64) -> f64;
}

struct SphereGrid<'a> {
    lines: FaceLines<'a>,
    f: &'a dyn SphereFunction,
}

impl GridSource for SphereGrid<'_> {
    fn along_row(&self, i: usize, b: f64) -> f64 {
        self.lines.along_row(i, b)
    }
    fn along_col(&self, j: usize, a: f64) -> f64 {
        self.lines.along_col(j, a)
    }
    fn at(&self, a: f64, b: f64) -> f64 {
        self.f.value(&self.lines.face().to_sphere(a, b))
    }
}

struct PlanarGrid<'a> {
    field: &'a dyn PlanarField,
    component: usize,
    coords: &'a [f64],
}

impl PlanarGrid<'_> {
    fn eval(&self, a: f64, b: f64) -> f64 {
        self.field
            .value(&[a, b])
            .map(|v| v[self.component])
            .unwrap_or(f64::NAN)
    }
}

impl GridSource for PlanarGrid<'_> {
    fn along_row(&self, i: usize, b: f64) -> f64 {
        self.eval(self.coords[i], b)
    }
    fn along_col(&self, j: usize, a: f64) -> f64 {
        self.eval(a, self.coords[j])
    }
    fn at(&self, a: f64, b: f64) -> f64 {
        self.eval(a, b)
    }
}

/// Root of `g` on `[lo, hi]` with `g(lo) = glo`, `g(hi) = ghi` of opposite
/// signs (Illinois variant of regula falsi).
fn bracket_root<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, mut glo: f64, mut ghi: f64) -> f64 {
    if glo == 0.0 {
        return lo;
    }
    if ghi == 0.0 {
        return hi;
    }
    let mut side = 0i32;
    for _ in 0..100 {
        let c = (lo * ghi - hi * glo) / (ghi - glo);
        let c = if c.is_finite() && c > lo.min(hi) && c < lo.max(hi) {
            c
        } else {
            0.5 * (lo + hi)
        };
        let gc = g(c);
        if gc == 0.0 || (hi - lo).abs() < 1e-13 {
            return c;
        }
        if (gc < 0.0) == (glo < 0.0) {
            lo = c;
            glo = gc;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = c;
            ghi = gc;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
        if (hi - lo).abs() < 1e-13 {
            break;
        }
    }
    if glo.abs() < ghi.abs() {
        lo
    } else {
        hi
    }
}

/// Subdivisions tried, in order, when resolving an ambiguous cell.
const SADDLE_SUBDIVISIONS: [usize; 2] = [8, 32];

/// Whether the sign region of the corner `(a[0], b[0])` reaches the opposite
/// corner `(a[1], b[1])` inside an ambiguous cell. Decided by 4-connected
/// flood fill on an exactly sampled subgrid; the center value decides when
/// the subgrid is itself ambiguous.
fn saddle_joins_diagonal(src: &dyn GridSource, a: [f64; 2], b: [f64; 2], corner_neg: bool) -> bool {
    for s in SADDLE_SUBDIVISIONS {
        let w = s + 1;
        let mut sign = vec![false; w * w];
        for p in 0..w {
            for q in 0..w {
                let (ta, tb) = (p as f64 / s as f64, q as f64 / s as f64);
                let v = src.at(a[0] + ta * (a[1] - a[0]), b[0] + tb * (b[1] - b[0]));
                sign[p * w + q] = v < 0.0;
            }
        }
        // corners keep their node signs
        sign[0] = corner_neg;
        sign[w * w - 1] = corner_neg;
        sign[s] = !corner_neg;
        sign[s * w] = !corner_neg;
        let reaches = |from: usize, to: usize| {
            let target = sign[from];
            let mut seen = vec![false; w * w];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(c) = stack.pop() {
                if c == to {
                    return true;
                }
                let (p, q) = (c / w, c % w);
                let mut nb = [usize::MAX; 4];
                if p > 0 {
                    nb[0] = c - w;
                }
                if p + 1 < w {
                    nb[1] = c + w;
                }
                if q > 0 {
                    nb[2] = c - 1;
                }
                if q + 1 < w {
                    nb[3] = c + 1;
                }
                for n in nb {
                    if n != usize::MAX && !seen[n] && sign[n] == target {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            false
        };
        let main = reaches(0, w * w - 1);
        let anti = reaches(s, s * w);
        if main != anti {
            return main;
        }
    }
    let center = src.at(0.5 * (a[0] + a[1]), 0.5 * (b[0] + b[1]));
    (center < 0.0) == corner_neg
}

struct Fragment {
    verts: Vec<(f64, f64, GridLine)>,
    closed: bool,
}

/// Marching squares over the grid `coords × coords` with node values `vals`
/// (row-major `(i, j)`); returns polylines in chart coordinates. Open
/// fragments end on the grid boundary.
fn trace(src: &dyn GridSource, coords: &[f64], vals: &[f64]) -> Result<Vec<Fragment>> {
    let n = coords.len();
    let neg = |i: usize, j: usize| vals[i * n + j] < 0.0;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let flat = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                .iter()
                .all(|&(p, q)| vals[p * n + q].abs() < FLAT_CELL_FLOOR);
            if flat {
                return Err(Error::degenerate("cell with all corner values near zero"));
            }
        }
    }
    // Vertex ids: column edges (i,j)-(i+1,j) and row edges (i,j)-(i,j+1).
    let mut verts: Vec<(f64, f64, GridLine)> = Vec::new();
    let mut col_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut row_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n && neg(i, j) != neg(i + 1, j) {
                let a = bracket_root(
                    |a| src.along_col(j, a),
                    coords[i],
                    coords[i + 1],
                    src.along_col(j, coords[i]),
                    src.along_col(j, coords[i + 1]),
                );
                col_edge.insert((i, j), verts.len());
                verts.push((
                    a,
                    coords[j],
                    GridLine {
                        row: false,
                        index: j,
                        param: a,
                    },
                ));
            }
            if j + 1 < n && neg(i, j) != neg(i, j + 1) {
                let b = bracket_root(
                    |b| src.along_row(i, b),
                    coords[j],
                    coords[j + 1],
                    src.along_row(i, coords[j]),
                    src.along_row(i, coords[j + 1]),
                );
                row_edge.insert((i, j), verts.len());
                verts.push((
                    coords[i],
                    b,
                    GridLine {
                        row: true,
                        index: i,
                        param: b,
                    },
                ));
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    let link = |p: usize, q: usize, adj: &mut Vec<Vec<usize>>| {
        adj[p].push(q);
        adj[q].push(p);
    };
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let bottom = col_edge.get(&(i, j)).copied();
            let top = col_edge.get(&(i, j + 1)).copied();
            let left = row_edge.get(&(i, j)).copied();
            let right = row_edge.get(&(i + 1, j)).copied();
            let present: Vec<usize> = [bottom, right, top, left].iter().flatten().copied().collect();
            match present.len() {
                0 => {}
                2 => link(present[0], present[1], &mut adj),
                4 => {
                    let (bottom, right, top, left) =
                        (bottom.unwrap(), right.unwrap(), top.unwrap(), left.unwrap());
                    let joined = saddle_joins_diagonal(
                        src,
                        [coords[i], coords[i + 1]],
                        [coords[j], coords[j + 1]],
                        neg(i, j),
                    );
                    if joined {
                        link(bottom, right, &mut adj);
                        link(left, top, &mut adj);
                    } else {
                        link(bottom, left, &mut adj);
                        link(right, top, &mut adj);
                    }
                }
                _ => return Err(Error::degenerate("inconsistent marching-squares cell")),
            }
        }
    }
    let mut used = vec![false; verts.len()];
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut path = vec![start];
        used[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = adj[cur].iter().copied().find(|&q| q != prev && !used[q]);
            match next {
                Some(q) => {
                    used[q] = true;
                    path.push(q);
                    prev = cur;
                    cur = q;
                }
                None => {
                    let closes = path.len() > 2 && adj[cur].contains(&start);
                    return (path, closes);
                }
            }
        }
    };
    for v in 0..verts.len() {
        if !used[v] && adj[v].len() == 1 {
            let (path, _) = walk(v, &mut used);
            out.push(Fragment {
                verts: path.iter().map(|&p| verts[p]).collect(),
                closed: false,
            });
        }
    }
    for v in 0..verts.len() {
        if !used[v] {
            let (mut path, closes) = walk(v, &mut used);
            if !closes {
                return Err(Error::degenerate("interior curve fragment does not close"));
            }
            path.push(v);
            out.push(Fragment {
                verts: path.iter().map(|&p| verts[p]).collect(),
                closed: true,
            });
        }
    }
    Ok(out)
}

pub(crate) fn grid_coords(half: f64, h: f64) -> Vec<f64> {
    let cells = ((2.0 * half / h).ceil() as usize).max(2);
    (0..=cells)
        .map(|i| -half + 2.0 * half * i as f64 / cells as f64)
        .collect()
}

/// Zero set of a scalar function on S², traced on the six cube-face cores
/// and stitched across face boundaries. Cell size defaults to
/// [`curve_cell_size`] of the function's scale degree.
pub fn extract_zero_curve(f: &dyn SphereFunction) -> Result<CurveResult> {
    extract_zero_curve_with(f, curve_cell_size(f.scale_degree()))
}

pub fn extract_zero_curve_with(f: &dyn SphereFunction, h: f64) -> Result<CurveResult> {
    let coords = grid_coords(1.0, h);
    let mut pieces: Vec<Polyline> = Vec::new();
    for face in CubeFace::all() {
        let lines = FaceLines::new(f, face, &coords);
        let vals = lines.node_values();
        let src = SphereGrid { lines, f };
        for frag in trace(&src, &coords, &vals)? {
            pieces.push(Polyline {
                vertices: frag
                    .verts
                    .iter()
                    .map(|&(a, b, line)| CurveVertex {
                        x: face.to_sphere(a, b),
                        chart: face.id(),
                        line,
                    })
                    .collect(),
                closed: frag.closed,
            });
        }
    }
    let fragments = pieces.len();
    let (components, stitches) = stitch(pieces, 2.0 * h)?;
    Ok(CurveResult {
        components,
        cell_size: h,
        fragments,
        stitches,
        planar: false,
    })
}

/// Joins open fragments whose endpoints coincide (within `tol`) into
/// components; every endpoint must be matched.
fn stitch(pieces: Vec<Polyline>, tol: f64) -> Result<(Vec<Polyline>, usize)> {
    let (closed, open): (Vec<Polyline>, Vec<Polyline>) = pieces.into_iter().partition(|p| p.closed);
    // Endpoint e = 2·fragment + (0 start | 1 end).
    let ends: Vec<Vec3> = open
        .iter()
        .flat_map(|p| [p.vertices[0].x, p.vertices[p.vertices.len() - 1].x])
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let cell = tol.max(1e-9);
    let key = |x: &Vec3| {
        (
            (x[0] / cell).floor() as i64,
            (x[1] / cell).floor() as i64,
            (x[2] / cell).floor() as i64,
        )
    };
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (e, x) in ends.iter().enumerate() {
        buckets.entry(key(x)).or_default().push(e);
    }
    for (e, x) in ends.iter().enumerate() {
        let (kx, ky, kz) = key(x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &g in list {
                            let same_chart =
                                open[g / 2].vertices[0].chart == open[e / 2].vertices[0].chart;
                            if g > e && !same_chart {
                                let dd = dist3(x, &ends[g]);
                                if dd < tol {
                                    pairs.push((dd, e, g));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut mate = vec![usize::MAX; ends.len()];
    let mut stitches = 0;
    for (_, e, g) in pairs {
        if mate[e] == usize::MAX && mate[g] == usize::MAX {
            mate[e] = g;
            mate[g] = e;
            stitches += 1;
        }
    }
    if let Some(e) = mate.iter().position(|&m| m == usize::MAX) {
        return Err(Error::degenerate(format!(
            "unmatched curve endpoint at {:?}",
            ends[e]
        )));
    }
    let mut used = vec![false; open.len()];
    let mut components = closed;
    for start in 0..open.len() {
        if used[start] {
            continue;
        }
        let mut verts: Vec<CurveVertex> = Vec::new();
        let mut frag = start;
        let mut forward = true;
        loop {
            used[frag] = true;
            let mut vs = open[frag].vertices.clone();
            if !forward {
                vs.reverse();
            }
            if !verts.is_empty() {
                vs.remove(0);
            }
            verts.extend(vs);
            let exit = 2 * frag + usize::from(forward);
            let entry = mate[exit];
            let next = entry / 2;
            if next == start {
                break;
            }
            if used[next] {
                return Err(Error::degenerate("curve stitching revisited a fragment"));
            }
            frag = next;
            forward = entry % 2 == 0;
        }
        // The closing endpoint duplicates the start vertex up to rounding.
        let first = verts[0];
        verts.pop();
        verts.push(first);
        components.push(Polyline {
            vertices: verts,
            closed: true,
        });
    }
    Ok((components, stitches))
}

/// Zero set of component `component` of a planar field on the square
/// `[-half, half]²` with cell size `h`. Curves leaving the square are open.
pub fn extract_planar_curve(
    field: &dyn PlanarField,
    component: usize,
    half: f64,
    h: f64,
) -> Result<CurveResult> {
    if field.dim() != 2 {
        return Err(Error::invalid("planar curve extraction needs m = 2"));
    }
    let coords = grid_coords(half, h);
    let n = coords.len();
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            vals[i * n + j] = field.value(&[coords[i], coords[j]])?[component];
        }
    }
    let src = PlanarGrid {
        field,
        component,
        coords: &coords,
    };
    planar_from_values(&src, &coords, &vals, h)
}

/// Zero set on the square of a scalar function given by a closure.
pub fn extract_planar_zero_set<G: Fn(f64, f64) -> f64>(g: G, half: f64, h: f64) -> Result<CurveResult> {
    struct Closure<'a, G> {
        g: &'a G,
        coords: &'a [f64],
    }
    impl<G: Fn(f64, f64) -> f64> GridSource for Closure<'_, G> {
        fn along_row(&self, i: usize, b: f64) -> f64 {
            (self.g)(self.coords[i], b)
        }
        fn along_col(&self, j: usize, a: f64) -> f64 {
            (self.g)(a, self.coords[j])
        }
        fn at(&self, a: f64, b: f64) -> f64 {
            (self.g)(a, b)
        }
    }
    let coords = grid_coords(half, h);
    let n = coords.len();
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            vals[i * n + j] = g(coords[i], coords[j]);
            if !vals[i * n + j].is_finite() {
                return Err(Error::degenerate("non-finite value on planar grid"));
            }
        }
    }
    let src = Closure { g: &g, coords: &coords };
    planar_from_values(&src, &coords, &vals, h)
}

fn planar_from_values(
    src: &dyn GridSource,
    coords: &[f64],
    vals: &[f64],
    h: f64,
) -> Result<CurveResult> {
    let frags = trace(src, coords, vals)?;
    let fragments = frags.len();
    let components = frags
        .into_iter()
        .map(|f| Polyline {
            vertices: f
                .verts
                .iter()
                .map(|&(a, b, line)| CurveVertex {
                    x: [a, b, 0.0],
                    chart: 0,
                    line,
                })
                .collect(),
            closed: f.closed,
        })
        .collect();
    Ok(CurveResult {
        components,
        cell_size: h,
        fragments,
        stitches: 0,
        planar: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_root() {
        let r = bracket_root(|x| x * x - 2.0, 1.0, 2.0, -1.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn planar_circle_is_one_closed_component() {
        let c = extract_planar_zero_set(|a, b| a * a + b * b - 0.25, 1.0, 0.05).unwrap();
        assert_eq!(c.components.len(), 1);
        assert!(c.components[0].closed);
        for v in &c.components[0].vertices {
            assert!(((v.x[0].powi(2) + v.x[1].powi(2)).sqrt() - 0.5).abs() < 1e-10);
        }
    }
}
