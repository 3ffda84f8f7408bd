use super::atlas::CubeFace;
use crate::geom::{normalize3, Vec3};
use crate::polycore::HomogeneousPoly;

/// Scalar function on S² consumed by the curve and point extractors.
pub trait SphereFunction: Sync {
    /// Degree setting the feature scale `d^{-1/2}`.
    fn scale_degree(&self) -> u32;

    /// Value at a unit vector.
    fn value(&self, x: &Vec3) -> f64;

    /// Polynomial form, enabling line-collapsed grid evaluation.
    fn as_polynomial(&self) -> Option<&HomogeneousPoly> {
        None
    }
}

impl SphereFunction for HomogeneousPoly {
    fn scale_degree(&self) -> u32 {
        self.degree().max(1)
    }

    fn value(&self, x: &Vec3) -> f64 {
        self.eval(x)
    }

    fn as_polynomial(&self) -> Option<&HomogeneousPoly> {
        Some(self)
    }
}

impl<T: SphereFunction + ?Sized> SphereFunction for &T {
    fn scale_degree(&self) -> u32 {
        (**self).scale_degree()
    }

    fn value(&self, x: &Vec3) -> f64 {
        (**self).value(x)
    }

    fn as_polynomial(&self) -> Option<&HomogeneousPoly> {
        (**self).as_polynomial()
    }
}

/// `a + s · b`.
pub struct SumFunction<'a> {
    pub a: &'a dyn SphereFunction,
    pub b: &'a dyn SphereFunction,
    pub s: f64,
}

impl SphereFunction for SumFunction<'_> {
    fn scale_degree(&self) -> u32 {
        self.a.scale_degree().max(self.b.scale_degree())
    }

    fn value(&self, x: &Vec3) -> f64 {
        self.a.value(x) + self.s * self.b.value(x)
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci)
}

/// Evaluation of a sphere function on the lines of a face grid.
///
/// Grid node `(i, j)` is the chart point `(coords[i], coords[j])`. Row `i`
/// is the line `a = coords[i]`, column `j` the line `b = coords[j]`.
/// Line evaluations share the sign and zero set of the sphere function but
/// not its scale.
pub struct FaceLines<'a> {
    face: CubeFace,
    coords: Vec<f64>,
    kind: LinesKind<'a>,
}

enum LinesKind<'a> {
    Poly {
        degree: u32,
        rows: Vec<f64>,
        cols: Vec<f64>,
    },
    Generic(&'a dyn SphereFunction),
}

impl<'a> FaceLines<'a> {
    pub fn new(f: &'a dyn SphereFunction, face: CubeFace, coords: &[f64]) -> Self {
        let kind = match f.as_polynomial() {
            Some(p) => {
                assert_eq!(p.m(), 2, "face grids need a polynomial on S²");
                let (rows, cols) = collapse(p, face, coords);
                LinesKind::Poly {
                    degree: p.degree(),
                    rows,
                    cols,
                }
            }
            None => LinesKind::Generic(f),
        };
        Self {
            face,
            coords: coords.to_vec(),
            kind,
        }
    }

    pub fn face(&self) -> CubeFace {
        self.face
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Value along row `i` at `b`.
    pub fn along_row(&self, i: usize, b: f64) -> f64 {
        match &self.kind {
            LinesKind::Poly { degree, rows, .. } => {
                let w = *degree as usize + 1;
                horner(&rows[i * w..(i + 1) * w], b)
            }
            LinesKind::Generic(f) => f.value(&self.face.to_sphere(self.coords[i], b)),
        }
    }

    /// Value along column `j` at `a`.
    pub fn along_col(&self, j: usize, a: f64) -> f64 {
        match &self.kind {
            LinesKind::Poly { degree, cols, .. } => {
                let w = *degree as usize + 1;
                horner(&cols[j * w..(j + 1) * w], a)
            }
            LinesKind::Generic(f) => f.value(&self.face.to_sphere(a, self.coords[j])),
        }
    }

    /// Sphere values at all nodes, row-major in `(i, j)`.
    pub fn node_values(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.node_value(i, j);
            }
        }
        out
    }

    /// Sphere value at node `(i, j)`.
    pub fn node_value(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        match &self.kind {
            LinesKind::Poly { degree, .. } => {
                let q = 1.0 + a * a + b * b;
                self.along_row(i, b) * q.powf(-0.5 * *degree as f64)
            }
            LinesKind::Generic(f) => f.value(&self.face.to_sphere(a, b)),
        }
    }
}

/// Univariate coefficient tables of `P(face point)` along every row and
/// every column of the grid.
fn collapse(p: &HomogeneousPoly, face: CubeFace, coords: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = p.degree() as usize;
    let w = d + 1;
    let n = coords.len();
    let (ia, ib) = face.chart_axes();
    let mut pw = vec![1.0; n * w];
    for (i, &c) in coords.iter().enumerate() {
        for e in 1..w {
            pw[i * w + e] = pw[i * w + e - 1] * c;
        }
    }
    let mut rows = vec![0.0; n * w];
    let mut cols = vec![0.0; n * w];
    let basis = p.basis();
    for (idx, &c) in p.coefficients().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = basis.exponents(idx);
        let c = if !face.positive && e[face.axis] % 2 == 1 {
            -c
        } else {
            c
        };
        let ea = e[ia] as usize;
        let eb = e[ib] as usize;
        for i in 0..n {
            rows[i * w + eb] += c * pw[i * w + ea];
            cols[i * w + ea] += c * pw[i * w + eb];
        }
    }
    (rows, cols)
}

/// Unit vector of the face point `(a, b)`.
pub fn face_point(face: CubeFace, a: f64, b: f64) -> Vec3 {
    normalize3(&face.ambient(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{sample_kostlan, KostlanSpec};

    #[test]
    fn collapsed_lines_match_direct_evaluation() {
        let p = sample_kostlan(&KostlanSpec::new(2, 1, 9, 4).unwrap());
        let p = p.component(0).clone();
        let coords: Vec<f64> = (0..7).map(|i| -1.15 + i as f64 * 2.3 / 6.0).collect();
        for face in CubeFace::all() {
            let lines = FaceLines::new(&p, face, &coords);
            for i in 0..7 {
                for j in 0..7 {
                    let x = face.to_sphere(coords[i], coords[j]);
                    let direct = p.eval(&x);
                    assert!((lines.node_value(i, j) - direct).abs() < 1e-9 * (1.0 + direct.abs()));
                    let y = face.ambient(coords[i], 0.3);
                    assert!((lines.along_row(i, 0.3) - p.eval(&y)).abs() < 1e-9 * (1.0 + p.eval(&y).abs()));
                    let y = face.ambient(-0.2, coords[j]);
                    assert!((lines.along_col(j, -0.2) - p.eval(&y)).abs() < 1e-9 * (1.0 + p.eval(&y).abs()));
                }
            }
        }
    }
}
