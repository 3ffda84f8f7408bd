use std::sync::Arc;

use super::{Degree, PlanarField};
use crate::error::{Error, Result};
use crate::polycore::{ln_factorial, AffineBasis, AffineJet, AffinePolynomialMap};
use crate::rng::fill_standard_normals;

/// Shared i.i.d. table `γ_β ~ N(0, 1_k)`, `|β| ≤ D`, realizing
/// `X̃_d(u) = Σ_{|β| ≤ min(d, D)} (d choose β)^{1/2} γ_β (u/√d)^β` and
/// `X̃_∞(u) = Σ_{|β| ≤ D} (1/β!)^{1/2} γ_β u^β` on one probability space.
#[derive(Clone, Debug)]
pub struct CoupledPair {
    basis: Arc<AffineBasis>,
    gamma: Vec<Vec<f64>>,
    seed: u64,
}

/// One member of a [`CoupledPair`] as an explicit polynomial map.
#[derive(Clone, Debug)]
pub struct CoupledView {
    degree: Degree,
    poly: AffinePolynomialMap,
}

/// Samples the shared table. Entry `β` of component `j` is the deviate keyed
/// by `(seed, j, index(β))`, so tables of different `D` agree on their common
/// part.
pub fn sample_coupled(m: usize, k: usize, max_degree: u32, seed: u64) -> Result<CoupledPair> {
    if max_degree < 1 {
        return Err(Error::invalid("coupled truncation order must be at least 1"));
    }
    if m < 1 || k < 1 {
        return Err(Error::invalid("coupled pair needs m, k >= 1"));
    }
    let basis = AffineBasis::new(m, max_degree);
    let gamma = (0..k)
        .map(|j| {
            let mut g = vec![0.0; basis.len()];
            fill_standard_normals(seed, j as u64, &mut g);
            g
        })
        .collect();
    Ok(CoupledPair { basis, gamma, seed })
}

impl CoupledPair {
    pub fn m(&self) -> usize {
        self.basis.m()
    }

    pub fn k(&self) -> usize {
        self.gamma.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.basis.max_degree()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gamma(&self, component: usize) -> &[f64] {
        &self.gamma[component]
    }

    pub fn basis(&self) -> &Arc<AffineBasis> {
        &self.basis
    }

    /// Scale applied to `γ_β` in the requested view.
    pub fn coefficient_scale(&self, degree: Degree, index: usize) -> f64 {
        let b = self.basis.degree_of(index);
        let ln_beta_fact = self.basis.ln_factorial_of(index);
        match degree {
            Degree::Infinite => (-0.5 * ln_beta_fact).exp(),
            Degree::Finite(d) => {
                if b > d {
                    return 0.0;
                }
                let ln_multinomial =
                    ln_factorial(d as u64) - ln_factorial((d - b) as u64) - ln_beta_fact;
                (0.5 * ln_multinomial - 0.5 * b as f64 * (d as f64).ln()).exp()
            }
        }
    }

    pub fn view(&self, degree: Degree) -> CoupledView {
        if let Degree::Finite(d) = degree {
            assert!(d >= 1, "degree must be at least 1");
        }
        let scales: Vec<f64> = (0..self.basis.len())
            .map(|i| self.coefficient_scale(degree, i))
            .collect();
        let coeffs = self
            .gamma
            .iter()
            .map(|g| g.iter().zip(&scales).map(|(a, s)| a * s).collect())
            .collect();
        CoupledView {
            degree,
            poly: AffinePolynomialMap::new(Arc::clone(&self.basis), coeffs)
                .expect("basis-shaped table"),
        }
    }
}

/// Jet (order ≤ 1) of the view `degree` of `pair` at `u`.
pub fn eval_coupled(pair: &CoupledPair, degree: Degree, u: &[f64], r: usize) -> Result<AffineJet> {
    if r > 1 {
        return Err(Error::UnsupportedOrder(r));
    }
    if u.len() != pair.m() {
        return Err(Error::invalid("point dimension does not match m"));
    }
    Ok(pair.view(degree).poly.jet(u, r))
}

impl CoupledView {
    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn polynomial(&self) -> &AffinePolynomialMap {
        &self.poly
    }
}

impl PlanarField for CoupledView {
    fn dim(&self) -> usize {
        self.poly.m()
    }

    fn codim(&self) -> usize {
        self.poly.k()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        PlanarField::jet(&self.poly, u, order)
    }

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.poly.eval(u))
    }
}

/// Truncated Bargmann–Fock field `X_∞(u) = Σ ξ_β u^β`, `ξ_β ~ N(0, 1_k/β!)`.
#[derive(Clone, Debug)]
pub struct BargmannFockField {
    view: CoupledView,
}

impl BargmannFockField {
    pub fn sample(m: usize, k: usize, max_degree: u32, seed: u64) -> Result<Self> {
        let pair = sample_coupled(m, k, max_degree, seed)?;
        Ok(Self {
            view: pair.view(Degree::Infinite),
        })
    }

    pub fn from_pair(pair: &CoupledPair) -> Self {
        Self {
            view: pair.view(Degree::Infinite),
        }
    }

    pub fn truncation_order(&self) -> u32 {
        self.view.poly.basis().max_degree()
    }

    pub fn polynomial(&self) -> &AffinePolynomialMap {
        &self.view.poly
    }
}

impl PlanarField for BargmannFockField {
    fn dim(&self) -> usize {
        self.view.dim()
    }

    fn codim(&self) -> usize {
        self.view.codim()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        self.view.jet(u, order)
    }

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.view.value(u)
    }
}
