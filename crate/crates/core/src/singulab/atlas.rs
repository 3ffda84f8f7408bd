use crate::geom::{normalize3, Vec3};

/// Default chart overlap margin, as a fraction of the face half-width.
pub const DEFAULT_OVERLAP: f64 = 0.15;

/// Gnomonic chart of S² centered on the face `sign · e_axis` of the cube.
/// Chart point `(a, b)` is the ray through the ambient point with
/// `x[axis] = sign`, `x[ia] = a`, `x[ib] = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CubeFace {
    pub axis: usize,
    pub positive: bool,
}

impl CubeFace {
    pub fn all() -> [CubeFace; 6] {
        let mut out = [CubeFace {
            axis: 0,
            positive: true,
        }; 6];
        for (id, f) in out.iter_mut().enumerate() {
            *f = CubeFace::from_id(id);
        }
        out
    }

    pub fn from_id(id: usize) -> Self {
        assert!(id < 6, "cube face id out of range");
        CubeFace {
            axis: id / 2,
            positive: id % 2 == 0,
        }
    }

    pub fn id(&self) -> usize {
        2 * self.axis + usize::from(!self.positive)
    }

    pub fn sign(&self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }

    /// Ambient axes carrying the chart coordinates `(a, b)`.
    pub fn chart_axes(&self) -> (usize, usize) {
        ((self.axis + 1) % 3, (self.axis + 2) % 3)
    }

    /// Unnormalized ambient point of chart coordinates `(a, b)`.
    pub fn ambient(&self, a: f64, b: f64) -> Vec3 {
        let (ia, ib) = self.chart_axes();
        let mut x = [0.0; 3];
        x[self.axis] = self.sign();
        x[ia] = a;
        x[ib] = b;
        x
    }

    pub fn to_sphere(&self, a: f64, b: f64) -> Vec3 {
        normalize3(&self.ambient(a, b))
    }

    /// Chart coordinates of `x`, if `x` lies in the open hemisphere of the face.
    pub fn chart_coords(&self, x: &Vec3) -> Option<(f64, f64)> {
        let lambda = self.sign() * x[self.axis];
        if lambda <= 0.0 {
            return None;
        }
        let (ia, ib) = self.chart_axes();
        Some((x[ia] / lambda, x[ib] / lambda))
    }

    /// Whether `x` lies in the face extended by `margin`.
    pub fn contains(&self, x: &Vec3, margin: f64) -> bool {
        match self.chart_coords(x) {
            Some((a, b)) => a.abs() <= 1.0 + margin && b.abs() <= 1.0 + margin,
            None => false,
        }
    }

    /// Orthonormal frame at chart point `(a, b)` from Gram–Schmidt on `(∂_a, ∂_b)`.
    pub fn frame(&self, a: f64, b: f64) -> (Vec3, Vec3) {
        let h = 1e-7;
        let p = self.to_sphere(a, b);
        let pa = self.to_sphere(a + h, b);
        let pb = self.to_sphere(a, b + h);
        let project = |v: Vec3| {
            let c = crate::geom::dot3(&v, &p);
            [v[0] - c * p[0], v[1] - c * p[1], v[2] - c * p[2]]
        };
        let ta = project(crate::geom::sub3(&pa, &p));
        let e1 = normalize3(&ta);
        let tb = project(crate::geom::sub3(&pb, &p));
        let c = crate::geom::dot3(&tb, &e1);
        let e2 = normalize3(&[tb[0] - c * e1[0], tb[1] - c * e1[1], tb[2] - c * e1[2]]);
        (e1, e2)
    }
}

/// Face whose core contains `x` (largest coordinate magnitude).
pub fn primary_face(x: &Vec3) -> CubeFace {
    let mut axis = 0;
    for i in 1..3 {
        if x[i].abs() > x[axis].abs() {
            axis = i;
        }
    }
    CubeFace {
        axis,
        positive: x[axis] >= 0.0,
    }
}

/// Chart coordinates on `to` of the point with coordinates `(a, b)` on `from`.
pub fn transition(from: CubeFace, to: CubeFace, a: f64, b: f64) -> Option<(f64, f64)> {
    to.chart_coords(&from.ambient(a, b))
}

/// Chart systems for the manifolds handled by the extractors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartAtlas {
    /// S¹ by the angle `θ ↦ (cos θ, sin θ)`.
    Circle,
    /// S² by six gnomonic cube faces with the given overlap margin.
    CubeSphere { overlap: f64 },
    /// The closed disk of the given radius in `R^m`, identity chart.
    Disk { m: usize, radius: f64 },
}

impl ChartAtlas {
    pub fn sphere() -> Self {
        ChartAtlas::CubeSphere {
            overlap: DEFAULT_OVERLAP,
        }
    }

    pub fn unit_disk(m: usize) -> Self {
        ChartAtlas::Disk { m, radius: 1.0 }
    }

    pub fn chart_count(&self) -> usize {
        match self {
            ChartAtlas::Circle | ChartAtlas::Disk { .. } => 1,
            ChartAtlas::CubeSphere { .. } => 6,
        }
    }

    /// Charts whose (overlap-extended) domain contains the point.
    pub fn charts_containing(&self, x: &[f64]) -> Vec<usize> {
        match *self {
            ChartAtlas::Circle => vec![0],
            ChartAtlas::Disk { radius, .. } => {
                if crate::geom::norm(x) <= radius {
                    vec![0]
                } else {
                    Vec::new()
                }
            }
            ChartAtlas::CubeSphere { overlap } => {
                let v = crate::geom::to_vec3(x);
                CubeFace::all()
                    .iter()
                    .filter(|f| f.contains(&v, overlap))
                    .map(|f| f.id())
                    .collect()
            }
        }
    }
}
