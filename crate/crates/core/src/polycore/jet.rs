use nalgebra::DMatrix;

use super::poly::PolynomialMap;
use crate::error::{Error, Result};
use crate::geom::{dot, norm, tangent_frame};

/// Tolerance on `|x| - 1` for inputs that must lie on the sphere.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// `r`-jet (r ≤ 2) of `ψ = P|_{S^m}` at `x`, expressed in an orthonormal
/// tangent frame.
#[derive(Clone, Debug)]
pub struct SphericalJet {
    pub x: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub value: Vec<f64>,
    /// k × m
    pub gradient: DMatrix<f64>,
    /// one symmetric m × m matrix per component
    pub hessian: Vec<DMatrix<f64>>,
    pub order: usize,
    /// `x · ∇P_j`, which equals `d · P_j(x)` by Euler's identity.
    pub radial_derivative: Vec<f64>,
}

impl SphericalJet {
    /// Ambient vector `Σ_i v_i e_i` for frame coordinates `v`.
    pub fn frame_vector(&self, v: &[f64]) -> Vec<f64> {
        let n = self.x.len();
        let mut out = vec![0.0; n];
        for (vi, e) in v.iter().zip(&self.frame) {
            for (o, ei) in out.iter_mut().zip(e) {
                *o += vi * ei;
            }
        }
        out
    }
}

pub(crate) fn check_unit(x: &[f64]) -> Result<()> {
    let n = norm(x);
    if (n - 1.0).abs() > UNIT_TOLERANCE || !n.is_finite() {
        return Err(Error::NonUnitInput { norm: n });
    }
    Ok(())
}

/// Values of `P` at a unit vector.
pub fn evaluate_map(p: &PolynomialMap, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.m() + 1 {
        return Err(Error::invalid("point dimension does not match m + 1"));
    }
    check_unit(x)?;
    Ok(p.eval_unchecked(x))
}

/// Jet of `P|_{S^m}` at `x` of order `r`.
///
/// Gradient: frame components of the ambient gradient. Hessian:
/// `Eᵀ (∇²P − (x·∇P) I) E` for the frame matrix `E`, which is the frame
/// expression of `P_x ∇²P P_x − (x·∇P) P_x`.
pub fn spherical_jet(p: &PolynomialMap, x: &[f64], r: usize) -> Result<SphericalJet> {
    if r > 2 {
        return Err(Error::UnsupportedOrder(r));
    }
    if x.len() != p.m() + 1 {
        return Err(Error::invalid("point dimension does not match m + 1"));
    }
    check_unit(x)?;
    let m = p.m();
    let k = p.k();
    let nv = m + 1;
    let frame = tangent_frame(x);
    let jets = p.ambient_jets(x, r.max(1));
    let mut value = Vec::with_capacity(k);
    let mut radial = Vec::with_capacity(k);
    let mut gradient = DMatrix::zeros(k, if r >= 1 { m } else { 0 });
    let mut hessian = Vec::new();
    for (j, jet) in jets.iter().enumerate() {
        value.push(jet.value);
        let xg = dot(x, &jet.gradient);
        radial.push(xg);
        if r >= 1 {
            for (a, e) in frame.iter().enumerate() {
                gradient[(j, a)] = dot(e, &jet.gradient);
            }
        }
        if r >= 2 {
            let mut h = DMatrix::zeros(m, m);
            for a in 0..m {
                // H e_a
                let mut he = vec![0.0; nv];
                for (row, out) in he.iter_mut().enumerate() {
                    *out = dot(&jet.hessian[row * nv..(row + 1) * nv], &frame[a]);
                }
                for b in a..m {
                    let mut v = dot(&frame[b], &he);
                    if a == b {
                        v -= xg;
                    }
                    h[(a, b)] = v;
                    h[(b, a)] = v;
                }
            }
            hessian.push(h);
        }
    }
    Ok(SphericalJet {
        x: x.to_vec(),
        frame,
        value,
        gradient,
        hessian,
        order: r,
        radial_derivative: radial,
    })
}
