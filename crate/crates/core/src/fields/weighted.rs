use nalgebra::DMatrix;

use super::{Degree, PlanarField};
use crate::error::Result;
use crate::polycore::AffineJet;

/// `Y = w · X` with `w(u) = (1 + |u|²/d)^{-d/2}` or `e^{-|u|²/2}` for `d = ∞`.
#[derive(Clone, Debug)]
pub struct WeightedField<F> {
    inner: F,
    degree: Degree,
}

pub fn weighted_field_y<F: PlanarField>(inner: F, degree: Degree) -> WeightedField<F> {
    WeightedField { inner, degree }
}

/// `w(u)`.
pub fn weight_factor(degree: Degree, u: &[f64]) -> f64 {
    let r2: f64 = u.iter().map(|x| x * x).sum();
    match degree {
        Degree::Infinite => (-0.5 * r2).exp(),
        Degree::Finite(d) => {
            let d = d as f64;
            (-0.5 * d * (r2 / d).ln_1p()).exp()
        }
    }
}

/// `∇ ln w` and its Hessian.
fn log_weight_derivatives(degree: Degree, u: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = u.len();
    match degree {
        Degree::Infinite => (u.iter().map(|x| -x).collect(), -DMatrix::identity(m, m)),
        Degree::Finite(d) => {
            let d = d as f64;
            let q = 1.0 + u.iter().map(|x| x * x).sum::<f64>() / d;
            let grad = u.iter().map(|x| -x / q).collect();
            let hess = DMatrix::from_fn(m, m, |i, j| {
                let delta = if i == j { 1.0 } else { 0.0 };
                -delta / q + 2.0 * u[i] * u[j] / (d * q * q)
            });
            (grad, hess)
        }
    }
}

impl<F> WeightedField<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }
}

impl<F: PlanarField> PlanarField for WeightedField<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn codim(&self) -> usize {
        self.inner.codim()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        let x = self.inner.jet(u, order)?;
        let w = weight_factor(self.degree, u);
        let m = u.len();
        let k = x.value.len();
        let mut y = AffineJet::zero(m, k, order);
        let (g, h) = if order >= 1 {
            log_weight_derivatives(self.degree, u)
        } else {
            (Vec::new(), DMatrix::zeros(0, 0))
        };
        for j in 0..k {
            y.value[j] = w * x.value[j];
            if order >= 1 {
                for a in 0..m {
                    y.gradient[(j, a)] = w * (x.gradient[(j, a)] + x.value[j] * g[a]);
                }
            }
            if order >= 2 {
                // w (H_X + ∇X ⊗ g + g ⊗ ∇X + X (g ⊗ g + ∇g))
                y.hessian[j] = DMatrix::from_fn(m, m, |a, b| {
                    w * (x.hessian[j][(a, b)]
                        + x.gradient[(j, a)] * g[b]
                        + g[a] * x.gradient[(j, b)]
                        + x.value[j] * (g[a] * g[b] + h[(a, b)]))
                });
            }
        }
        Ok(y)
    }
}
