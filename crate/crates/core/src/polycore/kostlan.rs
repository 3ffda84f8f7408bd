use nalgebra::DMatrix;

use super::jet::check_unit;
use super::multi_index::MonomialBasis;
use super::poly::{HomogeneousPoly, PolynomialMap};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, fill_standard_normals};

/// Type `(d, m, k)` of a Kostlan map plus the seed of its coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KostlanSpec {
    pub m: usize,
    pub k: usize,
    pub d: u32,
    pub seed: u64,
}

impl KostlanSpec {
    pub fn new(m: usize, k: usize, d: u32, seed: u64) -> Result<Self> {
        let spec = Self { m, k, d, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.k < 1 || self.d < 1 {
            return Err(Error::invalid(format!(
                "Kostlan spec needs m, k, d >= 1 (got m={}, k={}, d={})",
                self.m, self.k, self.d
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

/// Samples `P` with independent coefficients `ξ_α ~ N(0, d!/α!)`; coefficient
/// `α` of component `j` is the deviate keyed by `(seed, j, index(α))`.
pub fn sample_kostlan(spec: &KostlanSpec) -> PolynomialMap {
    let basis = MonomialBasis::get(spec.m, spec.d);
    let sd = basis.kostlan_sd();
    let components = (0..spec.k)
        .map(|j| {
            let mut c = vec![0.0; basis.len()];
            fill_standard_normals(spec.seed, j as u64, &mut c);
            for (v, s) in c.iter_mut().zip(sd) {
                *v *= s;
            }
            HomogeneousPoly::from_coefficients(spec.m, spec.d, c).expect("finite coefficients")
        })
        .collect();
    PolynomialMap::new(components).expect("consistent components")
}

/// Monte Carlo estimate of `E{P(x) P(y)ᵀ}` with per-entry standard errors.
#[derive(Clone, Debug)]
pub struct CovarianceEstimate {
    pub mean: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
    pub trials: usize,
}

pub fn empirical_covariance(
    spec: &KostlanSpec,
    x: &[f64],
    y: &[f64],
    trials: usize,
) -> Result<CovarianceEstimate> {
    spec.validate()?;
    if trials < 100 {
        return Err(Error::invalid("empirical covariance needs at least 100 trials"));
    }
    check_unit(x)?;
    check_unit(y)?;
    let k = spec.k;
    let mut sum = DMatrix::<f64>::zeros(k, k);
    let mut sum_sq = DMatrix::<f64>::zeros(k, k);
    for t in 0..trials {
        let p = sample_kostlan(&spec.with_seed(derive_seed(spec.seed, t as u64)));
        let px = p.eval_unchecked(x);
        let py = p.eval_unchecked(y);
        for a in 0..k {
            for b in 0..k {
                let v = px[a] * py[b];
                sum[(a, b)] += v;
                sum_sq[(a, b)] += v * v;
            }
        }
    }
    let n = trials as f64;
    let mean = &sum / n;
    let stderr = DMatrix::from_fn(k, k, |a, b| {
        let var = (sum_sq[(a, b)] / n - mean[(a, b)].powi(2)).max(0.0) * n / (n - 1.0);
        (var / n).sqrt()
    });
    Ok(CovarianceEstimate {
        mean,
        stderr,
        trials,
    })
}
