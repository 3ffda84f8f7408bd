//! Expected counts of codimension-m singular points: closed forms, the
//! deterministic Cartwright–Sturmfels ceiling, Kac–Rice densities obtained by
//! conditioning the Gaussian jet, their integrals, and Monte Carlo estimates
//! of the square-root-law constant `C_W`.

mod closed_form;
mod density;
mod sqrt_law;

pub use closed_form::{
    ball_volume, cartwright_sturmfels_bound, cartwright_sturmfels_sphere_bound,
    expected_zeros_closed_form, sphere_volume,
};
pub use density::{
    density_dump, density_profile, integrate_density, integrate_expected_count,
    kac_rice_density, DensityEstimate, DensityProfile, Region, MAX_CONDITIONING,
};
pub use sqrt_law::{sqrt_law_constant, SqrtLawConfig, SqrtLawEstimate, SQRT_LAW_SPACING};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    ClosedForm,
    KacRiceMc,
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCount {
    pub value: f64,
    pub stderr: f64,
    pub method: CountMethod,
}
