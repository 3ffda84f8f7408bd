use std::sync::Arc;

use nalgebra::DMatrix;

use super::multi_index::{enumerate_multi_indices, ln_factorial};
use super::poly::{eval_flat, jets_flat};
use crate::error::{Error, Result};

/// All `β ∈ N^m` with `|β| ≤ D`, grouped by total degree, graded-lex inside
/// each degree.
#[derive(Debug)]
pub struct AffineBasis {
    m: usize,
    max_degree: u32,
    exponents: Vec<u32>,
    degrees: Vec<u32>,
}

impl AffineBasis {
    pub fn new(m: usize, max_degree: u32) -> Arc<Self> {
        assert!(m >= 1, "affine basis needs at least one variable");
        let mut exponents = Vec::new();
        let mut degrees = Vec::new();
        for j in 0..=max_degree {
            for b in enumerate_multi_indices(m - 1, j) {
                exponents.extend_from_slice(b.exponents());
                degrees.push(j);
            }
        }
        Arc::new(Self {
            m,
            max_degree,
            exponents,
            degrees,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exponents[i * self.m..(i + 1) * self.m]
    }

    pub fn degree_of(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    /// `ln β!`
    pub fn ln_factorial_of(&self, i: usize) -> f64 {
        self.exponents(i).iter().map(|&a| ln_factorial(a as u64)).sum()
    }

    pub fn index_of(&self, beta: &[u32]) -> Option<usize> {
        (0..self.len()).find(|&i| self.exponents(i) == beta)
    }
}

/// Value, Cartesian gradient (k × m) and Hessians of a map `R^m → R^k`.
#[derive(Clone, Debug)]
pub struct AffineJet {
    pub value: Vec<f64>,
    pub gradient: DMatrix<f64>,
    pub hessian: Vec<DMatrix<f64>>,
    pub order: usize,
}

impl AffineJet {
    pub fn zero(m: usize, k: usize, order: usize) -> Self {
        Self {
            value: vec![0.0; k],
            gradient: DMatrix::zeros(k, if order >= 1 { m } else { 0 }),
            hessian: if order >= 2 {
                vec![DMatrix::zeros(m, m); k]
            } else {
                Vec::new()
            },
            order,
        }
    }
}

/// Dense (non-homogeneous) polynomial map `R^m → R^k` of degree ≤ D.
#[derive(Clone, Debug)]
pub struct AffinePolynomialMap {
    basis: Arc<AffineBasis>,
    coeffs: Vec<Vec<f64>>,
}

impl AffinePolynomialMap {
    pub fn new(basis: Arc<AffineBasis>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| c.len() != basis.len()) {
            return Err(Error::invalid("coefficient table does not match the basis"));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(m: usize, k: usize, max_degree: u32) -> Self {
        let basis = AffineBasis::new(m, max_degree);
        let n = basis.len();
        Self {
            basis,
            coeffs: vec![vec![0.0; n]; k],
        }
    }

    pub fn basis(&self) -> &Arc<AffineBasis> {
        &self.basis
    }

    pub fn m(&self) -> usize {
        self.basis.m()
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self, component: usize) -> &[f64] {
        &self.coeffs[component]
    }

    pub fn set_coefficient(&mut self, component: usize, beta: &[u32], c: f64) -> Result<()> {
        let i = self
            .basis
            .index_of(beta)
            .ok_or_else(|| Error::invalid(format!("monomial {beta:?} exceeds the basis degree")))?;
        self.coeffs[component][i] = c;
        Ok(())
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let slices: Vec<&[f64]> = self.coeffs.iter().map(|c| c.as_slice()).collect();
        let mut out = vec![0.0; self.k()];
        eval_flat(
            &self.basis.exponents,
            self.m(),
            self.basis.max_degree as usize,
            &slices,
            u,
            &mut out,
        );
        out
    }

    pub fn jet(&self, u: &[f64], order: usize) -> AffineJet {
        let m = self.m();
        let slices: Vec<&[f64]> = self.coeffs.iter().map(|c| c.as_slice()).collect();
        let jets = jets_flat(
            &self.basis.exponents,
            m,
            self.basis.max_degree as usize,
            &slices,
            u,
            order,
        );
        let mut out = AffineJet::zero(m, self.k(), order);
        for (j, jet) in jets.into_iter().enumerate() {
            out.value[j] = jet.value;
            if order >= 1 {
                for a in 0..m {
                    out.gradient[(j, a)] = jet.gradient[a];
                }
            }
            if order >= 2 {
                out.hessian[j] = DMatrix::from_row_slice(m, m, &jet.hessian);
            }
        }
        out
    }
}
