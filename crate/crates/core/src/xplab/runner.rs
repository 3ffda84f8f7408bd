use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, DISCARD_CHECK_MAX_DEGREE};
use crate::error::{Error, Result};
use crate::fields::{default_truncation_order, sample_coupled, Degree, KernelKind, KernelSpec, PlanarField};
use crate::kacrice::{integrate_expected_count, Region};
use crate::polycore::{sample_kostlan, KostlanSpec, PolynomialMap};
use crate::rng::{derive_seed, substream_seed};
use crate::singulab::{
    extract_fold_curve, extract_zero_curve, extract_zero_curve_with, find_cusps,
    find_singular_points, min_knot_points, sample_knot, sphere_class_points, SingularityClass,
    SphereSearch,
};
use crate::topo::{
    auto_amplitude, betti_of, semicontinuity_trial, PerturbationMode, PerturbationSpec,
};

/// Default Monte Carlo samples per density evaluation in `kacrice` runs.
pub const DEFAULT_MC_SAMPLES: usize = 20_000;
/// Grid nodes per axis for the sup-norm in `coupled` runs.
pub const COUPLED_GRID: usize = 41;

/// One Monte Carlo trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment_id: String,
    pub m: usize,
    pub k: usize,
    pub d: u32,
    pub trial: usize,
    /// `substream_seed(root, experiment_id, trial)`.
    pub seed: u64,
    pub statistic: String,
    /// `NaN` for discarded trials.
    pub value: f64,
    pub discarded: bool,
    /// Wall-clock time in whole milliseconds; the only field that may differ
    /// between identical runs.
    pub runtime_ms: u64,
}

impl TrialRecord {
    /// Equality of everything but the runtime.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let value_eq = self.value == other.value || (self.value.is_nan() && other.value.is_nan());
        self.experiment_id == other.experiment_id
            && (self.m, self.k, self.d, self.trial, self.seed) == (other.m, other.k, other.d, other.trial, other.seed)
            && self.statistic == other.statistic
            && value_eq
            && self.discarded == other.discarded
    }
}

fn kostlan(cfg: &ExperimentConfig, d: u32, seed: u64) -> Result<PolynomialMap> {
    Ok(sample_kostlan(&KostlanSpec::new(cfg.m, cfg.k, d, seed)?))
}

fn point_count(cfg: &ExperimentConfig, psi: &PolynomialMap, class: SingularityClass) -> Result<f64> {
    let result = match (cfg.m, cfg.resolution.point_spacing) {
        (2, Some(h)) => sphere_class_points(psi, class, &SphereSearch::with_spacing(h))?,
        _ => find_singular_points(psi, class)?,
    };
    Ok(result.count() as f64)
}

/// Sup over `|u| ≤ 1` of `|X̃_d − X̃_∞|` on a square grid clipped to the disk
/// (`m = 2`) or a uniform grid of `[-1, 1]` (`m = 1`).
pub fn coupled_sup_gap(m: usize, k: usize, d: u32, seed: u64) -> Result<f64> {
    let pair = sample_coupled(m, k, default_truncation_order(m), seed)?;
    let fin = pair.view(Degree::Finite(d));
    let inf = pair.view(Degree::Infinite);
    let n = COUPLED_GRID;
    let axis: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let points: Vec<Vec<f64>> = if m == 1 {
        axis.iter().map(|&a| vec![a]).collect()
    } else {
        let mut pts: Vec<Vec<f64>> = axis
            .iter()
            .flat_map(|&a| axis.iter().map(move |&b| vec![a, b]))
            .filter(|u| u[0].hypot(u[1]) <= 1.0)
            .collect();
        pts.extend((0..4 * n).map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / (4 * n) as f64;
            vec![t.cos(), t.sin()]
        }));
        pts
    };
    let mut sup: f64 = 0.0;
    for u in &points {
        let (a, b) = (fin.value(u)?, inf.value(u)?);
        for (x, y) in a.iter().zip(&b) {
            sup = sup.max((x - y).abs());
        }
    }
    Ok(sup)
}

/// Statistic of one trial of `cfg` at degree `d`. Degenerate samples return
/// an error for which [`Error::is_degenerate`] holds.
pub fn trial_statistic(cfg: &ExperimentConfig, d: u32, seed: u64) -> Result<f64> {
    match cfg.kind {
        ExperimentKind::Zeros | ExperimentKind::Scaling => {
            point_count(cfg, &kostlan(cfg, d, seed)?, SingularityClass::ZeroSet(cfg.k))
        }
        ExperimentKind::Crit => point_count(cfg, &kostlan(cfg, d, seed)?, SingularityClass::CriticalPoints),
        ExperimentKind::Minima => point_count(cfg, &kostlan(cfg, d, seed)?, SingularityClass::Minima),
        ExperimentKind::Fold => {
            let (_, curve) = extract_fold_curve(&kostlan(cfg, d, seed)?)?;
            Ok(betti_of(&curve, None).b0 as f64)
        }
        ExperimentKind::Cusp => Ok(find_cusps(&kostlan(cfg, d, seed)?)?.count() as f64),
        ExperimentKind::Components => {
            let psi = kostlan(cfg, d, seed)?;
            if cfg.m == 1 {
                return point_count(cfg, &psi, SingularityClass::ZeroSet(1));
            }
            let f = psi.component(0);
            let curve = match cfg.resolution.cell_size {
                Some(h) => extract_zero_curve_with(f, h)?,
                None => extract_zero_curve(f)?,
            };
            Ok(betti_of(&curve, None).b0 as f64)
        }
        ExperimentKind::Semicont => {
            let psi = kostlan(cfg, d, seed)?;
            let f = psi.component(0);
            let amplitude = match cfg.resolution.amplitude {
                Some(a) => a,
                None => auto_amplitude(f)?,
            };
            let spec = semicont_spec(d, amplitude, derive_seed(seed, 1));
            let t = semicontinuity_trial(f, &spec)?;
            match (t.both_transversal, t.b0_pert) {
                (true, Some(b)) => Ok(b as f64 - t.b0_base as f64),
                _ => Err(Error::degenerate("perturbed zero set failed its transversality audit")),
            }
        }
        ExperimentKind::Coupled => coupled_sup_gap(cfg.m, cfg.k, d, seed),
        ExperimentKind::Knot => {
            let n = cfg.resolution.knot_points.unwrap_or_else(|| min_knot_points(d));
            Ok(sample_knot(d, n, seed)?.crossings as f64)
        }
        ExperimentKind::Kacrice => {
            let kernel = KernelSpec::new(KernelKind::RescaledKostlan(d), cfg.m, cfg.k)?;
            let samples = cfg.resolution.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
            let e = integrate_expected_count(
                SingularityClass::ZeroSet(cfg.m),
                &kernel,
                Region::Sphere,
                1,
                samples,
                seed,
            )?;
            Ok(e.value)
        }
    }
}

/// Perturbation used by `semicont` trials: a Kostlan polynomial of degree
/// `4d` on even seeds and a trigonometric bump of bandwidth `4d` on odd ones.
pub fn semicont_spec(d: u32, amplitude: f64, seed: u64) -> PerturbationSpec {
    let (mode, omega) = if seed % 2 == 0 {
        (PerturbationMode::RandomHighDegree(4 * d.max(1)), 0.0)
    } else {
        (PerturbationMode::TrigBump, 2.0 * (d.max(1) as f64).sqrt())
    };
    PerturbationSpec {
        amplitude,
        omega,
        mode,
        seed,
    }
}

/// Runs every `(d, trial)` pair of `cfg` on the current rayon pool. Records
/// are ordered by `(d, trial)` whatever the scheduling. Fails when the
/// discard rate at some `d ≤ 256` exceeds `cfg.max_discard_rate`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let jobs: Vec<(u32, usize)> = cfg
        .degrees
        .iter()
        .flat_map(|&d| (0..cfg.trials).map(move |t| (d, t)))
        .collect();
    let statistic = cfg.kind.statistic();
    let records = jobs
        .par_iter()
        .map(|&(d, trial)| {
            let seed = substream_seed(cfg.seed, &cfg.id, trial as u64);
            let start = Instant::now();
            let outcome = trial_statistic(cfg, d, seed);
            let runtime_ms = start.elapsed().as_millis() as u64;
            let (value, discarded) = match outcome {
                Ok(v) => (v, false),
                Err(e) if e.is_degenerate() => (f64::NAN, true),
                Err(e) => return Err(e),
            };
            Ok(TrialRecord {
                experiment_id: cfg.id.clone(),
                m: cfg.m,
                k: cfg.k,
                d,
                trial,
                seed,
                statistic: statistic.to_string(),
                value,
                discarded,
                runtime_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for &d in cfg.degrees.iter().filter(|&&d| d <= DISCARD_CHECK_MAX_DEGREE) {
        let n = records.iter().filter(|r| r.d == d).count();
        let bad = records.iter().filter(|r| r.d == d && r.discarded).count();
        let rate = bad as f64 / n as f64;
        if rate > cfg.max_discard_rate {
            return Err(Error::ExcessiveDiscards {
                d,
                rate,
                limit: cfg.max_discard_rate,
            });
        }
    }
    Ok(records)
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<TrialRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
