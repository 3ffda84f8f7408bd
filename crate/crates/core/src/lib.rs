//! Numerical laboratory for singularities of random Kostlan polynomial maps
//! on spheres.
//!
//! * [`polycore`]: multi-indices, Kostlan sampling, spherical jets.
//! * [`fields`]: the rescaled field `X_d`, its Bargmann–Fock limit, the
//!   coupled representation and covariance-kernel jets.
//! * [`singulab`]: singularity classes and their numerical extraction
//!   (points, curves, folds and cusps, random knots).
//! * [`topo`]: Betti numbers, Morse audits, semicontinuity trials, histograms.
//! * [`kacrice`]: closed-form and Kac–Rice expected counts, square-root-law
//!   constants.
//! * [`xplab`]: experiment runner, scaling fits, reports and the acceptance
//!   checks.

pub mod error;
pub mod fields;
pub mod geom;
pub mod kacrice;
pub mod polycore;
pub mod rng;
pub mod singulab;
pub mod topo;
pub mod xplab;

pub use error::{Error, Result};
