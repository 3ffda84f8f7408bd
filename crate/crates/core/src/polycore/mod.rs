//! Homogeneous polynomial maps on spheres: multi-index algebra, Kostlan
//! sampling and jets of the restriction to `S^m`.

mod affine;
mod jet;
mod kostlan;
mod multi_index;
mod poly;

pub use affine::{AffineBasis, AffineJet, AffinePolynomialMap};
pub use jet::{evaluate_map, spherical_jet, SphericalJet, UNIT_TOLERANCE};
pub use kostlan::{empirical_covariance, sample_kostlan, CovarianceEstimate, KostlanSpec};
pub use multi_index::{
    binomial, enumerate_multi_indices, index_of, ln_factorial, ln_multinomial, multinomial,
    MonomialBasis, MultiIndex,
};
pub use poly::{AmbientJet, HomogeneousPoly, PolynomialMap, MAX_VARS};
