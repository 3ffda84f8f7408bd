//! Local models of Kostlan maps: the rescaled field `X_d(u) = P(1, u/√d)`, its
//! Bargmann–Fock limit, the coupled representation in which `X̃_d → X̃_∞`
//! almost surely, the weighted fields `Y`, and covariance-kernel jets.

mod coupled;
mod kernel;
mod rescaled;
mod truncation;
mod weighted;

pub use coupled::{eval_coupled, sample_coupled, BargmannFockField, CoupledPair, CoupledView};
pub use kernel::{kernel_jet_covariance, KernelKind, KernelSpec, PSD_TOLERANCE};
pub use rescaled::{RescaledField, RESCALED_DOMAIN_RADIUS};
pub use truncation::{
    default_truncation_order, truncation_order, truncation_tail, DEFAULT_RADIUS,
    DEFAULT_TOLERANCE,
};
pub use weighted::{weighted_field_y, weight_factor, WeightedField};

use crate::error::Result;
use crate::polycore::{AffineJet, AffinePolynomialMap};

/// Degree parameter of the rescaled family; `Infinite` is the Bargmann–Fock
/// limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    Finite(u32),
    Infinite,
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::Infinite => write!(f, "inf"),
        }
    }
}

/// A smooth map `R^m → R^k` given through its jets (order ≤ 2) in Cartesian
/// coordinates.
pub trait PlanarField {
    fn dim(&self) -> usize;
    fn codim(&self) -> usize;
    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet>;

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jet(u, 0)?.value)
    }
}

impl PlanarField for AffinePolynomialMap {
    fn dim(&self) -> usize {
        self.m()
    }

    fn codim(&self) -> usize {
        self.k()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        if order > 2 {
            return Err(crate::Error::UnsupportedOrder(order));
        }
        Ok(AffinePolynomialMap::jet(self, u, order))
    }

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(u))
    }
}

impl<T: PlanarField + ?Sized> PlanarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn codim(&self) -> usize {
        (**self).codim()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        (**self).jet(u, order)
    }

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        (**self).value(u)
    }
}
