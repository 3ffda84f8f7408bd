use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{dot, Vec3};
use crate::polycore::{sample_kostlan, HomogeneousPoly, KostlanSpec, PolynomialMap};
use crate::rng::SimRng;
use crate::singulab::{
    circle_scan_size, curve_cell_size, extract_zero_curve, find_singular_points, find_zeros_circle,
    scan_roots, CubeFace, FaceLines, SingularityClass, SphereFunction, SumFunction,
};

use super::betti::betti_of;

/// Nodes of the dense grid on which the perturbation sup-norm is checked.
pub const SUP_CHECK_NODES: usize = 20_000;

/// Scaling of random polynomial perturbations below the grid sup-norm, which
/// underestimates the true sup.
const SUP_SAFETY: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationMode {
    /// `ε · sin(ω⟨a, x⟩ + φ)` with random unit `a` and phase `φ`.
    TrigBump,
    /// A Kostlan polynomial of the given degree scaled to sup-norm below `ε`.
    RandomHighDegree(u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    pub omega: f64,
    pub mode: PerturbationMode,
    pub seed: u64,
}

#[derive(Clone, Debug)]
enum PerturbationKind {
    Trig { axis: Vec<f64>, omega: f64, phase: f64 },
    Poly(HomogeneousPoly),
}

/// A realized perturbation on `S^m`, `m ∈ {1, 2}`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    m: usize,
    amplitude: f64,
    kind: PerturbationKind,
}

fn sphere_grid(m: usize, n: usize) -> Vec<Vec<f64>> {
    match m {
        1 => (0..n)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}

impl Perturbation {
    pub fn build(spec: &PerturbationSpec, m: usize) -> Result<Self> {
        if !(1..=2).contains(&m) {
            return Err(Error::invalid("perturbations live on S¹ or S²"));
        }
        if !(spec.amplitude >= 0.0) || !spec.amplitude.is_finite() {
            return Err(Error::invalid("perturbation amplitude must be finite and ≥ 0"));
        }
        let kind = match spec.mode {
            PerturbationMode::TrigBump => {
                if !(spec.omega > 0.0) {
                    return Err(Error::invalid("trigonometric bump needs ω > 0"));
                }
                let mut rng = SimRng::new(spec.seed);
                PerturbationKind::Trig {
                    axis: rng.unit_vector(m + 1),
                    omega: spec.omega,
                    phase: 2.0 * PI * rng.uniform(),
                }
            }
            PerturbationMode::RandomHighDegree(d) => {
                let g = sample_kostlan(&KostlanSpec::new(m, 1, d, spec.seed)?);
                let g = g.component(0).clone();
                let sup = sphere_grid(m, SUP_CHECK_NODES)
                    .iter()
                    .map(|x| g.eval(x).abs())
                    .fold(0.0, f64::max);
                if !(sup > 0.0) {
                    return Err(Error::degenerate("perturbation polynomial vanishes on the grid"));
                }
                PerturbationKind::Poly(g.scaled(SUP_SAFETY * spec.amplitude / sup))
            }
        };
        Ok(Self {
            m,
            amplitude: spec.amplitude,
            kind,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            PerturbationKind::Trig { axis, omega, phase } => {
                self.amplitude * (omega * dot(axis, x) + phase).sin()
            }
            PerturbationKind::Poly(g) => g.eval(x),
        }
    }

    /// Degree whose feature scale `d^{-1/2}` matches the perturbation.
    pub fn bandwidth_degree(&self) -> u32 {
        match &self.kind {
            PerturbationKind::Trig { omega, .. } => (omega * omega).ceil().max(1.0) as u32,
            PerturbationKind::Poly(g) => g.degree().max(1),
        }
    }

    /// Maximum of `|perturbation|` over the dense check grid.
    pub fn grid_sup(&self) -> f64 {
        sphere_grid(self.m, SUP_CHECK_NODES)
            .iter()
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }
}

impl SphereFunction for Perturbation {
    fn scale_degree(&self) -> u32 {
        self.bandwidth_degree()
    }

    fn value(&self, x: &Vec3) -> f64 {
        self.eval(x)
    }

    fn as_polynomial(&self) -> Option<&HomogeneousPoly> {
        match &self.kind {
            PerturbationKind::Poly(g) => Some(g),
            PerturbationKind::Trig { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemicontinuityTrial {
    pub b0_base: usize,
    /// `None` when the perturbed extraction failed its audit.
    pub b0_pert: Option<usize>,
    pub both_transversal: bool,
    pub amplitude: f64,
}

/// `p · |x|^{2j}`, equal to `p` on the sphere.
fn lift(p: &HomogeneousPoly, degree: u32) -> HomogeneousPoly {
    let m = p.m();
    let mut r2 = HomogeneousPoly::zero(m, 2);
    for i in 0..=m {
        let mut e = vec![0u32; m + 1];
        e[i] = 2;
        r2.set_coefficient(&e, 1.0);
    }
    let mut out = p.clone();
    while out.degree() < degree {
        out = out.mul(&r2);
    }
    out
}

/// Half the minimum of `|p|` over extraction-grid nodes outside the one-cell
/// tube around the zero set of `p` on `S^m` and over the critical points of
/// `p`. Below every critical value, `{|p| ≤ ε}` is a disjoint union of
/// collars around the components of the zero set, so no component can vanish
/// or merge with another.
pub fn auto_amplitude(p: &HomogeneousPoly) -> Result<f64> {
    let d = p.degree().max(1);
    let min = match p.m() {
        1 => {
            let n = circle_scan_size(d);
            let step = 2.0 * PI / n as f64;
            let vals: Vec<f64> = (0..n)
                .map(|i| {
                    let t = i as f64 * step;
                    p.eval(&[t.cos(), t.sin()])
                })
                .collect();
            let reach = 1isize;
            let mut in_tube = vec![false; n];
            for i in 0..n {
                if (vals[i] < 0.0) != (vals[(i + 1) % n] < 0.0) {
                    for o in 1 - reach..=reach {
                        in_tube[(i as isize + o).rem_euclid(n as isize) as usize] = true;
                    }
                }
            }
            (0..n)
                .filter(|&i| !in_tube[i])
                .map(|i| vals[i].abs())
                .fold(f64::INFINITY, f64::min)
        }
        2 => {
            let h = curve_cell_size(d);
            let coords = crate::singulab::grid_coords(1.0, h);
            let n = coords.len();
            let reach = 1isize;
            let mut min = f64::INFINITY;
            for face in CubeFace::all() {
                let vals = FaceLines::new(p, face, &coords).node_values();
                let mut in_tube = vec![false; n * n];
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        let c = [
                            vals[i * n + j],
                            vals[i * n + j + 1],
                            vals[(i + 1) * n + j],
                            vals[(i + 1) * n + j + 1],
                        ];
                        let neg = c.iter().filter(|v| **v < 0.0).count();
                        if neg == 0 || neg == 4 {
                            continue;
                        }
                        for di in -reach..=reach + 1 {
                            for dj in -reach..=reach + 1 {
                                let (a, b) = (i as isize + di, j as isize + dj);
                                if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                                    in_tube[a as usize * n + b as usize] = true;
                                }
                            }
                        }
                    }
                }
                for (v, t) in vals.iter().zip(&in_tube) {
                    if !t {
                        min = min.min(v.abs());
                    }
                }
            }
            min
        }
        _ => return Err(Error::invalid("auto amplitude needs m ∈ {1, 2}")),
    };
    let crit = find_singular_points(&PolynomialMap::scalar(p.clone()), SingularityClass::CriticalPoints)?;
    let min = crit.points.iter().map(|c| p.eval(&c.x).abs()).fold(min, f64::min);
    if !min.is_finite() {
        return Err(Error::degenerate("tube around the zero set covers the whole grid"));
    }
    Ok(0.5 * min)
}

fn circle_count(f: impl Fn(f64) -> f64, degree: u32) -> Result<(usize, usize)> {
    let (roots, near) = scan_roots(f, 0.0, 2.0 * PI, circle_scan_size(degree), true)?;
    Ok((roots.len(), near))
}

fn audited<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_degenerate() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Component counts of the zero sets of `f` and `f + g` on `S^m` for a
/// perturbation `g` realized from `spec`.
pub fn semicontinuity_trial(
    baseline: &HomogeneousPoly,
    spec: &PerturbationSpec,
) -> Result<SemicontinuityTrial> {
    let m = baseline.m();
    let pert = Perturbation::build(spec, m)?;
    let d = baseline.degree();
    let (b0_base, base_ok, b0_pert, pert_ok) = match m {
        1 => {
            let base = find_zeros_circle(&PolynomialMap::scalar(baseline.clone()))?;
            let b0_base = base.count();
            let base_ok = base.near_tangencies == 0;
            if pert.amplitude == 0.0 {
                (b0_base, base_ok, Some(b0_base), base_ok)
            } else {
                let scan_degree = d.max(pert.bandwidth_degree());
                let f = |t: f64| {
                    let x = [t.cos(), t.sin()];
                    baseline.eval(&x) + pert.eval(&x)
                };
                match audited(circle_count(f, scan_degree))? {
                    Some((n, near)) => (b0_base, base_ok, Some(n), near == 0),
                    None => (b0_base, base_ok, None, false),
                }
            }
        }
        2 => {
            let b0_base = betti_of(&extract_zero_curve(baseline)?, None).b0;
            if pert.amplitude == 0.0 {
                (b0_base, true, Some(b0_base), true)
            } else {
                let curve = match pert.as_polynomial() {
                    Some(g) if (g.degree() + d) % 2 == 0 => {
                        let top = g.degree().max(d);
                        let mut sum = lift(baseline, top);
                        sum.add_scaled(&lift(g, top), 1.0);
                        audited(extract_zero_curve(&sum))?
                    }
                    _ => audited(extract_zero_curve(&SumFunction {
                        a: baseline,
                        b: &pert,
                        s: 1.0,
                    }))?,
                };
                let b0 = curve.map(|c| betti_of(&c, None).b0);
                (b0_base, true, b0, b0.is_some())
            }
        }
        _ => return Err(Error::invalid("semicontinuity trials need m ∈ {1, 2}")),
    };
    Ok(SemicontinuityTrial {
        b0_base,
        b0_pert,
        both_transversal: base_ok && pert_ok && b0_pert.is_some(),
        amplitude: pert.amplitude,
    })
}

