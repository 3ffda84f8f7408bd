#![allow(dead_code)]
//! Independent oracles shared by the integration tests. None of these use
//! the extraction code under test.

use std::collections::VecDeque;
use std::f64::consts::PI;

/// Lat-long sample grid of a function on S², rotated by `rot` so that the
/// grid poles avoid features of interest.
pub struct LatLong {
    pub nt: usize,
    pub np: usize,
    pub vals: Vec<f64>,
}

pub fn rotate(rot: &[[f64; 3]; 3], x: &[f64; 3]) -> [f64; 3] {
    let mut y = [0.0; 3];
    for i in 0..3 {
        y[i] = rot[i][0] * x[0] + rot[i][1] * x[1] + rot[i][2] * x[2];
    }
    y
}

pub fn latlong<F: Fn(&[f64; 3]) -> f64>(f: F, nt: usize, rot: &[[f64; 3]; 3]) -> LatLong {
    let np = 2 * nt;
    let mut vals = vec![0.0; nt * np];
    for i in 0..nt {
        let t = (i as f64 + 0.5) * PI / nt as f64;
        for j in 0..np {
            let p = j as f64 * 2.0 * PI / np as f64;
            let x = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            vals[i * np + j] = f(&rotate(rot, &x));
        }
    }
    LatLong { nt, np, vals }
}

impl LatLong {
    /// Neighbours of `(i, j)`; rows past a pole continue on the opposite
    /// meridian.
    fn neighbours(&self, i: usize, j: usize, diagonal: bool) -> Vec<(usize, usize)> {
        let (nt, np) = (self.nt as i64, self.np as i64);
        let mut out = Vec::new();
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                if (di == 0 && dj == 0) || (!diagonal && di != 0 && dj != 0) {
                    continue;
                }
                let mut ii = i as i64 + di;
                let mut jj = j as i64 + dj;
                if ii < 0 {
                    ii = 0;
                    jj += np / 2;
                } else if ii >= nt {
                    ii = nt - 1;
                    jj += np / 2;
                }
                let jj = jj.rem_euclid(np);
                if (ii as usize, jj as usize) != (i, j) {
                    out.push((ii as usize, jj as usize));
                }
            }
        }
        // Cells of a polar row all surround the pole.
        if diagonal && (i == 0 || i + 1 == self.nt) {
            out.extend((0..self.np).filter(|&b| b != j).map(|b| (i, b)));
        }
        out
    }

    /// Number of connected sign regions (4-connectivity).
    pub fn sign_regions(&self) -> usize {
        let n = self.vals.len();
        let mut seen = vec![false; n];
        let mut regions = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            regions += 1;
            let neg = self.vals[s] < 0.0;
            let mut q = VecDeque::from([s]);
            seen[s] = true;
            while let Some(c) = q.pop_front() {
                let (i, j) = (c / self.np, c % self.np);
                for (a, b) in self.neighbours(i, j, false) {
                    let k = a * self.np + b;
                    if !seen[k] && (self.vals[k] < 0.0) == neg {
                        seen[k] = true;
                        q.push_back(k);
                    }
                }
            }
        }
        regions
    }

    /// Grid indices of strict local minima and maxima.
    pub fn extrema_cells(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let (mut mins, mut maxs) = (Vec::new(), Vec::new());
        for i in 0..self.nt {
            for j in 0..self.np {
                let v = self.vals[i * self.np + j];
                let nb = self.neighbours(i, j, true);
                if nb.iter().all(|&(a, b)| self.vals[a * self.np + b] > v) {
                    mins.push((i, j));
                }
                if nb.iter().all(|&(a, b)| self.vals[a * self.np + b] < v) {
                    maxs.push((i, j));
                }
            }
        }
        (mins, maxs)
    }

    pub fn cell_point(&self, rot: &[[f64; 3]; 3], i: usize, j: usize) -> [f64; 3] {
        let t = (i as f64 + 0.5) * PI / self.nt as f64;
        let p = j as f64 * 2.0 * PI / self.np as f64;
        rotate(rot, &[t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
    }

    /// Discrete minima and maxima merged into clusters of angular radius
    /// `radius` (anisotropic cells near the poles produce runs of extrema).
    pub fn clustered_extrema(&self, rot: &[[f64; 3]; 3], radius: f64) -> (usize, usize) {
        let (mins, maxs) = self.extrema_cells();
        let cluster = |cells: Vec<(usize, usize)>| {
            let mut reps: Vec<[f64; 3]> = Vec::new();
            for (i, j) in cells {
                let x = self.cell_point(rot, i, j);
                let near = reps.iter().any(|r| {
                    let c = (r[0] * x[0] + r[1] * x[1] + r[2] * x[2]).clamp(-1.0, 1.0);
                    c.acos() < radius
                });
                if !near {
                    reps.push(x);
                }
            }
            reps.len()
        };
        (cluster(mins), cluster(maxs))
    }

    /// Strict discrete local minima and maxima (8-neighbourhood).
    pub fn extrema(&self) -> (usize, usize) {
        let (mut mins, mut maxs) = (0, 0);
        for i in 0..self.nt {
            for j in 0..self.np {
                let v = self.vals[i * self.np + j];
                let nb = self.neighbours(i, j, true);
                if nb.iter().all(|&(a, b)| self.vals[a * self.np + b] > v) {
                    mins += 1;
                }
                if nb.iter().all(|&(a, b)| self.vals[a * self.np + b] < v) {
                    maxs += 1;
                }
            }
        }
        (mins, maxs)
    }
}

pub const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Rotation by angle `t` about the axis `(1, 1, 1)/√3` composed with a tilt,
/// moving the grid poles away from the coordinate axes.
pub fn generic_rotation(t: f64) -> [[f64; 3]; 3] {
    let (c, s) = (t.cos(), t.sin());
    let k = 1.0 / 3f64.sqrt();
    let u = [k, k, k];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let cross = match (i, j) {
                (0, 1) => -u[2],
                (0, 2) => u[1],
                (1, 0) => u[2],
                (1, 2) => -u[0],
                (2, 0) => -u[1],
                (2, 1) => u[0],
                _ => 0.0,
            };
            r[i][j] = c * delta + s * cross + (1.0 - c) * u[i] * u[j];
        }
    }
    r
}

/// Zeros of `f` on `[0, 2π)` counted by sign changes on `n` uniform nodes.
pub fn sign_scan_circle<F: Fn(f64) -> f64>(f: F, n: usize) -> usize {
    let vals: Vec<f64> = (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).collect();
    (0..n)
        .filter(|&i| (vals[i] < 0.0) != (vals[(i + 1) % n] < 0.0))
        .count()
}

/// Crossings of a closed planar polygon counted over all non-adjacent edge
/// pairs by parametric intersection.
pub fn brute_force_crossings(p: &[[f64; 2]]) -> usize {
    let n = p.len();
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            if j <= i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (p[i], p[(i + 1) % n]);
            let (c, d) = (p[j], p[(j + 1) % n]);
            let r = [b[0] - a[0], b[1] - a[1]];
            let s = [d[0] - c[0], d[1] - c[1]];
            let den = r[0] * s[1] - r[1] * s[0];
            if den == 0.0 {
                continue;
            }
            let qp = [c[0] - a[0], c[1] - a[1]];
            let t = (qp[0] * s[1] - qp[1] * s[0]) / den;
            let u = (qp[0] * r[1] - qp[1] * r[0]) / den;
            if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
                count += 1;
            }
        }
    }
    count
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Closed zero-set components of `g` on `[-half, half]²` lying inside the
/// open unit disk, counted by flood-fill: each such component is the outer
/// boundary of exactly one sign region that avoids the square's boundary.
/// Returns `(count, ambiguous)` where `ambiguous` counts regions whose outer
/// radius is within `margin` of 1.
pub fn planar_inside_regions<G: Fn(f64, f64) -> f64>(
    g: G,
    half: f64,
    n: usize,
    margin: f64,
) -> (usize, usize) {
    let coord = |i: usize| -half + 2.0 * half * (i as f64 + 0.5) / n as f64;
    let sign: Vec<bool> = (0..n * n).map(|k| g(coord(k / n), coord(k % n)) < 0.0).collect();
    let mut label = vec![usize::MAX; n * n];
    let (mut count, mut ambiguous) = (0, 0);
    for start in 0..n * n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut stack = vec![start];
        let mut touches = false;
        let mut rmax: f64 = 0.0;
        while let Some(c) = stack.pop() {
            let (i, j) = (c / n, c % n);
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                touches = true;
            }
            rmax = rmax.max(coord(i).hypot(coord(j)));
            let mut nb = Vec::with_capacity(4);
            if i > 0 { nb.push(c - n); }
            if i + 1 < n { nb.push(c + n); }
            if j > 0 { nb.push(c - 1); }
            if j + 1 < n { nb.push(c + 1); }
            for q in nb {
                if label[q] == usize::MAX && sign[q] == sign[start] {
                    label[q] = start;
                    stack.push(q);
                }
            }
        }
        if touches {
            continue;
        }
        if (rmax - 1.0).abs() < margin {
            ambiguous += 1;
        } else if rmax < 1.0 {
            count += 1;
        }
    }
    (count, ambiguous)
}
