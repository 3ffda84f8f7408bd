use nalgebra::DMatrix;
use rayon::prelude::*;

use super::closed_form::{ball_volume, sphere_volume};
use super::{CountMethod, ExpectedCount};
use crate::error::{Error, Result};
use crate::fields::{kernel_jet_covariance, KernelKind, KernelSpec, PSD_TOLERANCE};
use crate::rng::{derive_seed, SimRng};
use crate::singulab::SingularityClass;

/// Condition number of the value block above which conditioning is refused.
pub const MAX_CONDITIONING: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub class: SingularityClass,
    pub kernel: KernelSpec,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
}

/// Kac–Rice density `ρ(u) = p_{F(u)}(0) · E{|det ∇F(u)| | F(u) = 0}` of a
/// codimension-m class whose residual is the value of the field.
///
/// The joint law of `(F, ∇F)` comes from the kernel jet covariance; `∇F`
/// given `F = 0` is centered with covariance the Schur complement
/// `Σ_GG − Σ_GF Σ_FF⁻¹ Σ_FG`, and `E|det|` is a plain Monte Carlo mean.
pub fn kac_rice_density(
    class: SingularityClass,
    kernel: &KernelSpec,
    u: &[f64],
    mc_samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    let (m, k) = (kernel.m, kernel.k);
    match class {
        SingularityClass::ZeroSet(c) if c == k && k == m => {}
        _ => {
            return Err(Error::UnsupportedClass(format!(
                "{} needs a jet of order 2 or codim ≠ m; only ZeroSet(m) has a Kac–Rice density here",
                class.name()
            )))
        }
    }
    if mc_samples < 2 {
        return Err(Error::invalid("Kac–Rice Monte Carlo needs at least 2 samples"));
    }
    let cov = kernel_jet_covariance(kernel, u, 1)?;
    let b = 1 + m;
    let f_idx: Vec<usize> = (0..k).map(|j| j * b).collect();
    // row-major Jacobian entries ∂_i F_j
    let g_idx: Vec<usize> = (0..k)
        .flat_map(|j| (0..m).map(move |i| j * b + 1 + i))
        .collect();
    let sub = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| cov[(rows[r], cols[c])])
    };
    let s_ff = sub(&f_idx, &f_idx);
    let s_gf = sub(&g_idx, &f_idx);
    let s_gg = sub(&g_idx, &g_idx);

    let eig = s_ff.clone().symmetric_eigen();
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(lo > 0.0) || hi / lo > MAX_CONDITIONING {
        return Err(Error::IllConditioned(if lo > 0.0 { hi / lo } else { f64::INFINITY }));
    }
    let inv_ff = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l))
        * eig.eigenvectors.transpose();
    let det_ff: f64 = eig.eigenvalues.iter().product();
    let p0 = (2.0 * std::f64::consts::PI).powf(-(k as f64) / 2.0) / det_ff.sqrt();

    let mut cond = &s_gg - &s_gf * &inv_ff * s_gf.transpose();
    cond = 0.5 * (&cond + cond.transpose());
    let ce = cond.symmetric_eigen();
    let min_eigenvalue = ce.eigenvalues.min();
    if min_eigenvalue < -PSD_TOLERANCE {
        return Err(Error::SingularKernel { min_eigenvalue });
    }
    let root = &ce.eigenvectors * DMatrix::from_diagonal(&ce.eigenvalues.map(|l| l.max(0.0).sqrt()));

    let n = g_idx.len();
    let mut rng = SimRng::new(seed);
    let mut z = DMatrix::zeros(n, 1);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..mc_samples {
        for v in z.iter_mut() {
            *v = rng.normal();
        }
        let g = &root * &z;
        let jac = DMatrix::from_fn(k, m, |j, i| g[(j * m + i, 0)]);
        let det = jac.determinant().abs();
        sum += det;
        sum2 += det * det;
    }
    let nf = mc_samples as f64;
    let mean = sum / nf;
    let var = ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(DensityEstimate {
        value: p0 * mean,
        stderr: p0 * (var / nf).sqrt(),
    })
}

/// Densities at several points, each with its own substream.
pub fn density_profile(
    class: SingularityClass,
    kernel: &KernelSpec,
    points: Vec<Vec<f64>>,
    mc_samples: usize,
    seed: u64,
) -> Result<DensityProfile> {
    let est: Vec<DensityEstimate> = points
        .par_iter()
        .enumerate()
        .map(|(i, u)| kac_rice_density(class, kernel, u, mc_samples, derive_seed(seed, i as u64)))
        .collect::<Result<_>>()?;
    Ok(DensityProfile {
        class,
        kernel: *kernel,
        values: est.iter().map(|e| e.value).collect(),
        stderrs: est.iter().map(|e| e.stderr).collect(),
        points,
    })
}

/// Plain-text `u_1 … u_m rho stderr` rows.
pub fn density_dump(profile: &DensityProfile) -> String {
    let mut s = String::new();
    for ((u, r), e) in profile.points.iter().zip(&profile.values).zip(&profile.stderrs) {
        for x in u {
            s.push_str(&format!("{x:.17e} "));
        }
        s.push_str(&format!("{r:.17e} {e:.17e}\n"));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// Ball of the given radius in `R^m`.
    Disk { radius: f64 },
    /// The whole sphere `S^m`, for orthogonally invariant (Kostlan) kernels.
    Sphere,
}

/// Uniform Monte Carlo integral of `density` over the `m`-ball of radius
/// `radius` with `n_points` nodes. The standard error combines the spread of
/// the node values with their own standard errors.
pub fn integrate_density<F>(density: F, m: usize, radius: f64, n_points: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64], u64) -> Result<DensityEstimate> + Sync,
{
    if n_points < 2 {
        return Err(Error::invalid("integration needs at least 2 nodes"));
    }
    let mut rng = SimRng::new(seed);
    let mut nodes = Vec::with_capacity(n_points);
    while nodes.len() < n_points {
        let u: Vec<f64> = (0..m).map(|_| radius * (2.0 * rng.uniform() - 1.0)).collect();
        if u.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            nodes.push(u);
        }
    }
    let est: Vec<DensityEstimate> = nodes
        .par_iter()
        .enumerate()
        .map(|(i, u)| density(u, derive_seed(seed, i as u64 + 1)))
        .collect::<Result<_>>()?;
    let n = n_points as f64;
    let mean = est.iter().map(|e| e.value).sum::<f64>() / n;
    let spread = est.iter().map(|e| (e.value - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let inner = est.iter().map(|e| e.stderr * e.stderr).sum::<f64>() / n;
    let vol = ball_volume(m, radius);
    Ok((vol * mean, vol * ((spread + inner) / n).sqrt()))
}

/// `E #{u ∈ A : j_u X ∈ W} = ∫_A ρ`. On the sphere the Kostlan density is
/// constant, so the count is `ρ_{X_d}(0) · d^{m/2} · vol(S^m)`.
pub fn integrate_expected_count(
    class: SingularityClass,
    kernel: &KernelSpec,
    region: Region,
    quadrature_points: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<ExpectedCount> {
    let (value, stderr) = match region {
        Region::Disk { radius } => integrate_density(
            |u, s| kac_rice_density(class, kernel, u, mc_samples, s),
            kernel.m,
            radius,
            quadrature_points,
            seed,
        )?,
        Region::Sphere => {
            let KernelKind::RescaledKostlan(d) = kernel.kind else {
                return Err(Error::invalid("sphere integration needs the rescaled Kostlan kernel"));
            };
            let m = kernel.m;
            let rho = kac_rice_density(class, kernel, &vec![0.0; m], mc_samples, seed)?;
            let scale = (d as f64).powf(m as f64 / 2.0) * sphere_volume(m);
            (rho.value * scale, rho.stderr * scale)
        }
    };
    Ok(ExpectedCount {
        value,
        stderr,
        method: CountMethod::KacRiceMc,
    })
}
