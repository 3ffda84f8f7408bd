use nalgebra::DMatrix;

use super::Degree;
use crate::error::{Error, Result};

/// Eigenvalue floor below which a jet covariance is rejected.
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind {
    /// `(1 + uᵀv/d)^d`.
    RescaledKostlan(u32),
    /// `exp(uᵀv)`.
    BargmannFock,
    /// The kernel of `Y = w·X` for the given degree.
    WeightedY(Degree),
}

/// Covariance `K(u, v)·1_k` of a field `R^m → R^k` with i.i.d. components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub m: usize,
    pub k: usize,
}

/// `K`, `∂_{u_i}K`, `∂_{v_j}K` and `∂_{u_i}∂_{v_j}K` at one pair `(u, v)`.
#[derive(Clone, Debug)]
pub struct KernelDerivatives {
    pub value: f64,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dudv: DMatrix<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unweighted(degree: Degree, u: &[f64], v: &[f64]) -> KernelDerivatives {
    let m = u.len();
    match degree {
        Degree::Finite(d) => {
            let df = d as f64;
            let s = 1.0 + dot(u, v) / df;
            let s_d1 = if d >= 1 { s.powi(d as i32 - 1) } else { 0.0 };
            let s_d2 = if d >= 2 { s.powi(d as i32 - 2) } else { 0.0 };
            let value = s_d1 * s;
            let du = v.iter().map(|x| s_d1 * x).collect();
            let dv = u.iter().map(|x| s_d1 * x).collect();
            let c = (df - 1.0) / df * s_d2;
            let dudv = DMatrix::from_fn(m, m, |i, j| {
                let delta = if i == j { s_d1 } else { 0.0 };
                delta + c * v[i] * u[j]
            });
            KernelDerivatives { value, du, dv, dudv }
        }
        Degree::Infinite => {
            let k = dot(u, v).exp();
            KernelDerivatives {
                value: k,
                du: v.iter().map(|x| k * x).collect(),
                dv: u.iter().map(|x| k * x).collect(),
                dudv: DMatrix::from_fn(m, m, |i, j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    (delta + v[i] * u[j]) * k
                }),
            }
        }
    }
}

/// `(ln w(u), ∇ ln w(u))`.
fn log_weight(degree: Degree, u: &[f64]) -> (f64, Vec<f64>) {
    let r2 = dot(u, u);
    match degree {
        Degree::Infinite => (-0.5 * r2, u.iter().map(|x| -x).collect()),
        Degree::Finite(d) => {
            let df = d as f64;
            let q = 1.0 + r2 / df;
            (-0.5 * df * q.ln(), u.iter().map(|x| -x / q).collect())
        }
    }
}

impl KernelSpec {
    pub fn new(kind: KernelKind, m: usize, k: usize) -> Result<Self> {
        let spec = Self { kind, m, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.k < 1 {
            return Err(Error::invalid("kernel needs m, k >= 1"));
        }
        match self.kind {
            KernelKind::RescaledKostlan(0) | KernelKind::WeightedY(Degree::Finite(0)) => {
                Err(Error::invalid("kernel degree must be at least 1"))
            }
            _ => Ok(()),
        }
    }

    /// Scalar kernel `K(u, v)`.
    pub fn value(&self, u: &[f64], v: &[f64]) -> f64 {
        self.derivatives(u, v).value
    }

    /// Closed-form mixed partials of order ≤ (1, 1).
    pub fn derivatives(&self, u: &[f64], v: &[f64]) -> KernelDerivatives {
        match self.kind {
            KernelKind::RescaledKostlan(d) => unweighted(Degree::Finite(d), u, v),
            KernelKind::BargmannFock => unweighted(Degree::Infinite, u, v),
            KernelKind::WeightedY(degree) => {
                let base = unweighted(degree, u, v);
                let (lu, gu) = log_weight(degree, u);
                let (lv, gv) = log_weight(degree, v);
                let e = (lu + lv).exp();
                let m = u.len();
                let du = (0..m)
                    .map(|i| e * (gu[i] * base.value + base.du[i]))
                    .collect();
                let dv = (0..m)
                    .map(|j| e * (gv[j] * base.value + base.dv[j]))
                    .collect();
                let dudv = DMatrix::from_fn(m, m, |i, j| {
                    e * (gu[i] * gv[j] * base.value
                        + gu[i] * base.dv[j]
                        + gv[j] * base.du[i]
                        + base.dudv[(i, j)])
                });
                KernelDerivatives {
                    value: e * base.value,
                    du,
                    dv,
                    dudv,
                }
            }
        }
    }

    /// Covariance of `(X(u), ∇X(u))` for one scalar component, ordered
    /// `(X, ∂_1X, …, ∂_mX)`.
    pub fn scalar_jet_covariance(&self, u: &[f64]) -> DMatrix<f64> {
        let kd = self.derivatives(u, u);
        let m = u.len();
        let mut c = DMatrix::zeros(m + 1, m + 1);
        c[(0, 0)] = kd.value;
        for i in 0..m {
            // Cov(∂_iX(u), X(u)) = ∂_{u_i}K(u, v)|_{v=u}
            c[(i + 1, 0)] = kd.du[i];
            c[(0, i + 1)] = kd.du[i];
            for j in 0..m {
                c[(i + 1, j + 1)] = 0.5 * (kd.dudv[(i, j)] + kd.dudv[(j, i)]);
            }
        }
        c
    }
}

/// Covariance of the order-≤1 jet at `u`, of size `k(1+m)`: component `j`
/// occupies rows `j(1+m) .. (j+1)(1+m)`, ordered `(X_j, ∂_1X_j, …, ∂_mX_j)`.
/// Components are independent, so the matrix is block diagonal.
pub fn kernel_jet_covariance(spec: &KernelSpec, u: &[f64], r: usize) -> Result<DMatrix<f64>> {
    spec.validate()?;
    if r > 1 {
        return Err(Error::UnsupportedOrder(r));
    }
    if u.len() != spec.m {
        return Err(Error::invalid("point dimension does not match the kernel"));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("non-finite point"));
    }
    let block = if r == 0 {
        DMatrix::from_element(1, 1, spec.value(u, u))
    } else {
        spec.scalar_jet_covariance(u)
    };
    let min_eigenvalue = block.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eigenvalue >= -PSD_TOLERANCE) {
        return Err(Error::SingularKernel { min_eigenvalue });
    }
    let b = block.nrows();
    let mut out = DMatrix::zeros(spec.k * b, spec.k * b);
    for j in 0..spec.k {
        out.view_mut((j * b, j * b), (b, b)).copy_from(&block);
    }
    Ok(out)
}
