use rayon::prelude::*;

use super::closed_form::sphere_volume;
use crate::error::{Error, Result};
use crate::fields::{default_truncation_order, weighted_field_y, BargmannFockField, Degree};
use crate::rng::derive_seed;
use crate::singulab::{find_planar_points, SingularityClass};

/// Seeding grid spacing for point search in the unit disk.
pub const SQRT_LAW_SPACING: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtLawConfig {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub spacing: f64,
}

impl SqrtLawConfig {
    pub fn new(m: usize, trials: usize, seed: u64) -> Self {
        Self {
            m,
            trials,
            seed,
            spacing: SQRT_LAW_SPACING,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtLawEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Mean number of class points of `Y_∞` in the unit disk.
    pub mean_count: f64,
    pub trials: usize,
    pub discarded: usize,
}

/// `C_W = m · vol(S^m)/vol(S^{m−1}) · E #{u ∈ D^m : j_u Y_∞ ∈ W}` with
/// `Y_∞ = e^{−|u|²/2} X_∞`, estimated over independent Bargmann–Fock samples.
pub fn sqrt_law_constant(class: SingularityClass, config: &SqrtLawConfig) -> Result<SqrtLawEstimate> {
    let m = config.m;
    if config.trials == 0 {
        return Err(Error::invalid("square-root-law estimate needs at least one trial"));
    }
    let k = class.target_dim();
    class.validate(m, k)?;
    if class.codim(m) != m {
        return Err(Error::UnsupportedClass(format!(
            "{} is not a point class for m = {m}",
            class.name()
        )));
    }
    let order = default_truncation_order(m);
    let outcomes: Vec<Result<usize>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let x = BargmannFockField::sample(m, k, order, derive_seed(config.seed, t as u64))?;
            let y = weighted_field_y(x, Degree::Infinite);
            Ok(find_planar_points(&y, class, 1.0, config.spacing)?.count())
        })
        .collect();
    let mut counts = Vec::with_capacity(config.trials);
    let mut discarded = 0;
    for o in outcomes {
        match o {
            Ok(c) => counts.push(c as f64),
            Err(e) if e.is_degenerate() => discarded += 1,
            Err(e) => return Err(e),
        }
    }
    if counts.is_empty() {
        return Err(Error::degenerate("every square-root-law trial was discarded"));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = if counts.len() > 1 {
        counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let scale = m as f64 * sphere_volume(m) / sphere_volume(m - 1);
    Ok(SqrtLawEstimate {
        value: scale * mean,
        stderr: scale * (var / n).sqrt(),
        mean_count: mean,
        trials: counts.len(),
        discarded,
    })
}
