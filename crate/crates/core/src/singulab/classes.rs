use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Intrinsic singularity classes `W` in the jet bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingularityClass {
    /// `ψ = 0` for `ψ` with `k` components.
    ZeroSet(usize),
    /// `dψ = 0`, scalar `ψ`.
    CriticalPoints,
    /// Critical points with positive-definite Hessian.
    Minima,
    /// `det dψ = 0` for `m = k = 2`.
    FoldCurve,
    /// Fold points where `ker dψ` is tangent to the fold, `m = k = 2`.
    CuspPoints,
}

/// Smallest Hessian eigenvalue accepted as positive by the minima filter.
pub const MINIMUM_EIGENVALUE: f64 = 1e-9;

impl SingularityClass {
    pub fn name(&self) -> String {
        match self {
            SingularityClass::ZeroSet(k) => format!("zeros(k={k})"),
            SingularityClass::CriticalPoints => "critical".into(),
            SingularityClass::Minima => "minima".into(),
            SingularityClass::FoldCurve => "fold".into(),
            SingularityClass::CuspPoints => "cusp".into(),
        }
    }

    /// Jet order `r` on which membership depends.
    pub fn jet_order(&self) -> usize {
        match self {
            SingularityClass::ZeroSet(_) => 0,
            SingularityClass::CriticalPoints | SingularityClass::FoldCurve => 1,
            SingularityClass::Minima | SingularityClass::CuspPoints => 2,
        }
    }

    /// Codimension of the singular locus in an `m`-manifold.
    pub fn codim(&self, m: usize) -> usize {
        match self {
            SingularityClass::ZeroSet(k) => *k,
            SingularityClass::CriticalPoints | SingularityClass::Minima => m,
            SingularityClass::FoldCurve => 1,
            SingularityClass::CuspPoints => 2,
        }
    }

    /// Number of components of `ψ` the class applies to.
    pub fn target_dim(&self) -> usize {
        match self {
            SingularityClass::ZeroSet(k) => *k,
            SingularityClass::CriticalPoints | SingularityClass::Minima => 1,
            SingularityClass::FoldCurve | SingularityClass::CuspPoints => 2,
        }
    }

    /// Checks that the class applies to maps `R^m ⊇ M → R^k`.
    pub fn validate(&self, m: usize, k: usize) -> Result<()> {
        if k != self.target_dim() {
            return Err(Error::UnsupportedClass(format!(
                "{} needs k = {}, got k = {k}",
                self.name(),
                self.target_dim()
            )));
        }
        if matches!(self, SingularityClass::FoldCurve | SingularityClass::CuspPoints) && m != 2 {
            return Err(Error::UnsupportedClass(format!("{} needs m = 2", self.name())));
        }
        if self.codim(m) > m {
            return Err(Error::UnsupportedClass(format!(
                "{} has codimension {} > m = {m}",
                self.name(),
                self.codim(m)
            )));
        }
        Ok(())
    }

    /// Residual `F` of the class from a jet given in an orthonormal (or
    /// Cartesian) frame: `value` (k), `gradient` (k × m), `hessian` (k of m × m).
    /// Membership is `F = 0` (plus the openness condition for `Minima`).
    pub fn residual(
        &self,
        value: &[f64],
        gradient: &DMatrix<f64>,
        hessian: &[DMatrix<f64>],
    ) -> Result<Vec<f64>> {
        match self {
            SingularityClass::ZeroSet(_) => Ok(value.to_vec()),
            SingularityClass::CriticalPoints | SingularityClass::Minima => {
                Ok(gradient.row(0).iter().copied().collect())
            }
            SingularityClass::FoldCurve => Ok(vec![det2(gradient)]),
            SingularityClass::CuspPoints => {
                let det = det2(gradient);
                let v = kernel_vector(gradient)?;
                Ok(vec![det, det_derivative(gradient, hessian, &v)])
            }
        }
    }

    /// Openness condition on top of `F = 0`.
    pub fn accepts(&self, hessian: &[DMatrix<f64>]) -> bool {
        match self {
            SingularityClass::Minima => {
                hessian[0].clone().symmetric_eigen().eigenvalues.min() > MINIMUM_EIGENVALUE
            }
            _ => true,
        }
    }
}

fn det2(j: &DMatrix<f64>) -> f64 {
    j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)]
}

/// Unit kernel direction (frame coordinates) of a 2 × 2 Jacobian: the right
/// singular vector of the smallest singular value.
pub fn kernel_vector(j: &DMatrix<f64>) -> Result<[f64; 2]> {
    let svd = j.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let s = &svd.singular_values;
    let (imin, imax) = if s[0] <= s[1] { (0, 1) } else { (1, 0) };
    if s[imax] < 1e-10 {
        return Err(Error::degenerate("Jacobian kernel is two-dimensional"));
    }
    Ok([vt[(imin, 0)], vt[(imin, 1)]])
}

/// `D_v det J = tr(adj(J) · ∂_v J)` with `(∂_v J)[i][a] = Σ_b H_i[a][b] v_b`.
pub fn det_derivative(j: &DMatrix<f64>, hessian: &[DMatrix<f64>], v: &[f64; 2]) -> f64 {
    let dj = |i: usize, a: usize| hessian[i][(a, 0)] * v[0] + hessian[i][(a, 1)] * v[1];
    // adj(J) = [[J11, -J01], [-J10, J00]]
    j[(1, 1)] * dj(0, 0) - j[(0, 1)] * dj(1, 0) - j[(1, 0)] * dj(0, 1) + j[(0, 0)] * dj(1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codimensions() {
        assert_eq!(SingularityClass::ZeroSet(2).codim(2), 2);
        assert_eq!(SingularityClass::CriticalPoints.codim(2), 2);
        assert_eq!(SingularityClass::FoldCurve.codim(2), 1);
        assert_eq!(SingularityClass::CuspPoints.codim(2), 2);
        assert!(SingularityClass::ZeroSet(2).validate(1, 2).is_err());
        assert!(SingularityClass::CriticalPoints.validate(2, 2).is_err());
        assert!(SingularityClass::FoldCurve.validate(2, 2).is_ok());
    }

    #[test]
    fn whitney_cusp_residual_vanishes_at_origin() {
        // (u, v) -> (u^3 - u v, v) at the origin: J = [[0, 0], [0, 1]].
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        let h1 = DMatrix::zeros(2, 2);
        let r = SingularityClass::CuspPoints
            .residual(&[0.0, 0.0], &j, &[h0, h1])
            .unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
    }
}
