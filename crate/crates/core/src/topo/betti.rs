use serde::{Deserialize, Serialize};

use crate::geom::{dist3, geodesic, normalize3, to_vec3, Vec3};
use crate::singulab::{CurveResult, PointCloudResult};

/// Polyline endpoints closer than this are the same vertex of the stitch
/// graph.
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiSummary {
    pub b0: usize,
    /// Independent cycles; for a 1-manifold, the number of closed components.
    pub b1: usize,
    /// Components lying in the open reference disk.
    pub interior_b0: usize,
    /// Components meeting the closed reference disk.
    pub clipped_b0: usize,
}

/// Region used to classify components as interior or clipped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceDisk {
    /// Euclidean disk in the `(u1, u2)` plane (or an interval for `m = 1`).
    Planar { center: [f64; 2], radius: f64 },
    /// Geodesic cap on S².
    Cap { center: Vec3, radius: f64 },
}

impl ReferenceDisk {
    pub fn unit() -> Self {
        ReferenceDisk::Planar {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    fn distance(&self, x: &[f64]) -> f64 {
        match self {
            ReferenceDisk::Planar { center, .. } => {
                let dx = x[0] - center[0];
                let dy = x.get(1).copied().unwrap_or(0.0) - center[1];
                (dx * dx + dy * dy).sqrt()
            }
            ReferenceDisk::Cap { center, .. } => {
                geodesic(&normalize3(center), &normalize3(&to_vec3(x)))
            }
        }
    }

    fn radius(&self) -> f64 {
        match self {
            ReferenceDisk::Planar { radius, .. } | ReferenceDisk::Cap { radius, .. } => *radius,
        }
    }

    pub fn contains_open(&self, x: &[f64]) -> bool {
        self.distance(x) < self.radius()
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.distance(x) <= self.radius()
    }
}

/// Extraction results with a Betti summary.
pub trait BettiSource {
    fn betti(&self, disk: Option<&ReferenceDisk>) -> BettiSummary;
}

pub fn betti_of<S: BettiSource + ?Sized>(result: &S, disk: Option<&ReferenceDisk>) -> BettiSummary {
    result.betti(disk)
}

impl BettiSource for PointCloudResult {
    fn betti(&self, disk: Option<&ReferenceDisk>) -> BettiSummary {
        let (interior, clipped) = match disk {
            Some(d) => (
                self.points.iter().filter(|p| d.contains_open(&p.x)).count(),
                self.points.iter().filter(|p| d.contains_closed(&p.x)).count(),
            ),
            None => (self.points.len(), self.points.len()),
        };
        BettiSummary {
            b0: self.points.len(),
            b1: 0,
            interior_b0: interior,
            clipped_b0: clipped,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// The curve as a graph: nodes are endpoint clusters, edges are polylines
/// (a closed polyline is a loop). `b0 = C` and `b1 = E − V + C`.
impl BettiSource for CurveResult {
    fn betti(&self, disk: Option<&ReferenceDisk>) -> BettiSummary {
        let comps = &self.components;
        let e = comps.len();
        if e == 0 {
            return BettiSummary::default();
        }
        // endpoint slots 2i (start) and 2i + 1 (end)
        let ends: Vec<Vec3> = comps
            .iter()
            .flat_map(|c| {
                let first = c.vertices.first().map(|v| v.x).unwrap_or([0.0; 3]);
                let last = c.vertices.last().map(|v| v.x).unwrap_or([0.0; 3]);
                [first, last]
            })
            .collect();
        let mut slots = UnionFind::new(2 * e);
        for (i, c) in comps.iter().enumerate() {
            if c.closed {
                slots.union(2 * i, 2 * i + 1);
            }
        }
        let mut order: Vec<usize> = (0..2 * e).collect();
        order.sort_by(|&a, &b| ends[a][0].partial_cmp(&ends[b][0]).unwrap());
        for (p, &a) in order.iter().enumerate() {
            for &b in &order[p + 1..] {
                if ends[b][0] - ends[a][0] > ENDPOINT_TOLERANCE {
                    break;
                }
                if dist3(&ends[a], &ends[b]) <= ENDPOINT_TOLERANCE {
                    slots.union(a, b);
                }
            }
        }
        let mut node_roots: Vec<usize> = (0..2 * e).map(|s| slots.find(s)).collect();
        let mut edges = UnionFind::new(2 * e);
        for i in 0..e {
            edges.union(node_roots[2 * i], node_roots[2 * i + 1]);
        }
        let components: Vec<usize> = (0..e).map(|i| edges.find(node_roots[2 * i])).collect();
        node_roots.sort_unstable();
        node_roots.dedup();
        let v = node_roots.len();
        let mut roots = components.clone();
        roots.sort_unstable();
        roots.dedup();
        let c = roots.len();

        let (mut interior, mut clipped) = (c, c);
        if let Some(d) = disk {
            let mut inside = vec![true; c];
            let mut meets = vec![false; c];
            for (i, comp) in comps.iter().enumerate() {
                let k = roots.binary_search(&components[i]).unwrap();
                for vtx in &comp.vertices {
                    let x: &[f64] = if self.planar { &vtx.x[..2] } else { &vtx.x };
                    inside[k] &= d.contains_open(x);
                    meets[k] |= d.contains_closed(x);
                }
            }
            interior = inside.iter().filter(|&&a| a).count();
            clipped = meets.iter().filter(|&&a| a).count();
        }
        BettiSummary {
            b0: c,
            b1: e + c - v,
            interior_b0: interior,
            clipped_b0: clipped,
        }
    }
}
