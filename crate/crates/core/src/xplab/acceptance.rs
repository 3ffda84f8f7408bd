//! The thirteen acceptance checks. Each runs at its documented scale and
//! reports a pass flag with the measured quantities.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::fit::{scaling_fit, ScalingFit};
use super::report::{summarize, DegreeSummary};
use super::runner::{run_experiment, TrialRecord};
use crate::error::{Error, Result};
use crate::fields::{
    default_truncation_order, sample_coupled, BargmannFockField, Degree, KernelKind, KernelSpec,
    PlanarField,
};
use crate::kacrice::{
    cartwright_sturmfels_bound, cartwright_sturmfels_sphere_bound, integrate_expected_count,
    kac_rice_density, sqrt_law_constant, Region, SqrtLawConfig,
};
use crate::polycore::{empirical_covariance, sample_kostlan, KostlanSpec};
use crate::rng::{derive_seed, substream_seed, SimRng};
use crate::singulab::{
    extract_zero_curve, find_singular_points, min_knot_points, sample_knot, SingularityClass,
    EMBEDDING_FLOOR,
};
use crate::topo::{betti_histogram, disk_interior_b0, morse_audit, tv_distance, Histogram};

pub const CRITERION_COUNT: usize = 13;
/// Root seed of the acceptance runs.
pub const ACCEPTANCE_SEED: u64 = 20_240_611;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub number: usize,
    pub title: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} ({:.1} s)",
            self.number,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub fn criterion_title(number: usize) -> &'static str {
    match number {
        1 => "mean zero count on S¹",
        2 => "mean zero count for m = k = 2",
        3 => "square-root-law slopes",
        4 => "cusp scaling",
        5 => "deterministic critical-point bound",
        6 => "Morse audit",
        7 => "semicontinuity of b0",
        8 => "coupled convergence",
        9 => "covariance law and rotation invariance",
        10 => "Kac–Rice consistency",
        11 => "square-root-law constant",
        12 => "Betti-law stabilization",
        13 => "random knots",
        _ => "unknown",
    }
}

/// Runs criterion `number` (1-based) under root seed `seed`.
pub fn run_criterion(number: usize, seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let (pass, detail) = match number {
        1 => criterion_1(seed)?,
        2 => criterion_2(seed)?,
        3 => criterion_3(seed)?,
        4 => criterion_4(seed)?,
        5 => criterion_5(seed)?,
        6 => criterion_6(seed)?,
        7 => criterion_7(seed)?,
        8 => criterion_8(seed)?,
        9 => criterion_9(seed)?,
        10 => criterion_10(seed)?,
        11 => criterion_11(seed)?,
        12 => criterion_12(seed)?,
        13 => criterion_13(seed)?,
        _ => {
            return Err(Error::invalid(format!(
                "criteria are numbered 1..={CRITERION_COUNT}, got {number}"
            )))
        }
    };
    Ok(CriterionOutcome {
        number,
        title: criterion_title(number).to_string(),
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every criterion; a criterion that errors is reported as failed.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    (1..=CRITERION_COUNT)
        .map(|n| {
            run_criterion(n, seed).unwrap_or_else(|e| CriterionOutcome {
                number: n,
                title: criterion_title(n).to_string(),
                pass: false,
                detail: format!("error: {e}"),
                seconds: 0.0,
            })
        })
        .collect()
}

fn config(
    kind: ExperimentKind,
    id: &str,
    (m, k): (usize, usize),
    degrees: &[u32],
    trials: usize,
    seed: u64,
) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.id = id.to_string();
    c.m = m;
    c.k = k;
    c.degrees = degrees.to_vec();
    c.trials = trials;
    c.seed = seed;
    c
}

fn degree_stats(records: &[TrialRecord]) -> Result<Vec<DegreeSummary>> {
    Ok(summarize(records, None)?.degrees)
}

fn mean_se(g: &DegreeSummary) -> (f64, f64) {
    (g.mean.unwrap_or(f64::NAN), g.stderr.unwrap_or(f64::INFINITY))
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn slope_in(fit: &ScalingFit, target: f64, tol: f64) -> bool {
    (fit.slope - target).abs() <= tol
}

/// Means within 3 SE of `target(d)` and, when given, within `rel` of it.
fn means_match(
    stats: &[DegreeSummary],
    target: impl Fn(u32) -> f64,
    rel: Option<f64>,
) -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for g in stats {
        let (mean, se) = mean_se(g);
        let t = target(g.d);
        let ok = (mean - t).abs() < 3.0 * se && rel.map_or(true, |r| (mean - t).abs() < r * t);
        pass &= ok;
        parts.push(format!("d={} {:.3}±{:.3} vs {}", g.d, mean, se, t));
    }
    (pass, parts.join(", "))
}

fn criterion_1(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let cfg = config(ExperimentKind::Zeros, "c1-zeros", (1, 1), &[16, 64, 256], 4000, seed);
    let records = run_experiment(&cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = means_match(&degree_stats(&records)?, |d| 2.0 * (d as f64).sqrt(), Some(0.02));
    Ok((ok && secs < 120.0, format!("{detail}; runtime {secs:.1} s (limit 120 s)")))
}

fn criterion_2(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let cfg = config(ExperimentKind::Zeros, "c2-zeros", (2, 2), &[4, 9, 16], 500, seed);
    let records = run_experiment(&cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = means_match(&degree_stats(&records)?, |d| 2.0 * d as f64, None);
    Ok((ok && secs < 600.0, format!("{detail}; runtime {secs:.1} s (limit 600 s)")))
}

fn criterion_3(seed: u64) -> Result<(bool, String)> {
    let r1 = run_experiment(&config(ExperimentKind::Zeros, "c3-zeros-m1", (1, 1), &[16, 64, 256], 1000, seed))?;
    let f1 = scaling_fit(&r1, "zero_count")?;
    let r2 = run_experiment(&config(ExperimentKind::Zeros, "c3-zeros-m2", (2, 2), &[4, 9, 16], 500, seed))?;
    let f2 = scaling_fit(&r2, "zero_count")?;
    let r3 = run_experiment(&config(
        ExperimentKind::Components,
        "c3-components",
        (2, 1),
        &[16, 36, 64, 144],
        300,
        seed,
    ))?;
    let f3 = scaling_fit(&r3, "b0")?;
    let checks = [
        (slope_in(&f1, 0.5, 0.05), "zeros m=1", &f1, "0.50±0.05"),
        (slope_in(&f2, 1.0, 0.10), "zeros m=k=2", &f2, "1.00±0.10"),
        (slope_in(&f3, 1.0, 0.15), "nodal components m=2", &f3, "1.00±0.15"),
    ];
    let detail = checks
        .iter()
        .map(|(ok, name, f, want)| {
            format!(
                "{name} slope {:.4}±{:.4} (want {want}){}",
                f.slope,
                f.slope_stderr,
                if *ok { "" } else { " out of range" }
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok((checks.iter().all(|c| c.0), detail))
}

fn criterion_4(seed: u64) -> Result<(bool, String)> {
    let records = run_experiment(&config(ExperimentKind::Cusp, "c4-cusps", (2, 2), &[6, 12, 24, 48], 300, seed))?;
    let fit = scaling_fit(&records, "cusp_count")?;
    let over = records
        .iter()
        .filter(|r| !r.discarded && r.value > 1e3 * (r.d as f64).powi(2))
        .count();
    let means = degree_stats(&records)?
        .iter()
        .map(|g| format!("d={} {:.2}", g.d, g.mean.unwrap_or(f64::NAN)))
        .collect::<Vec<_>>()
        .join(", ");
    let ok = slope_in(&fit, 1.0, 0.15) && over == 0;
    Ok((
        ok,
        format!(
            "slope {:.4}±{:.4} (want 1.00±0.15); means {means}; trials over 10³d²: {over}",
            fit.slope, fit.slope_stderr
        ),
    ))
}

fn criterion_5(seed: u64) -> Result<(bool, String)> {
    let degrees: Vec<u32> = (2..=8).collect();
    let mut violations = 0;
    let mut literal_violations = 0;
    let mut checked = 0;
    let mut discarded = 0;
    for m in [1usize, 2] {
        let records = run_experiment(&config(
            ExperimentKind::Crit,
            &format!("c5-crit-m{m}"),
            (m, 1),
            &degrees,
            72,
            seed,
        ))?;
        for r in &records {
            if r.discarded {
                discarded += 1;
                continue;
            }
            checked += 1;
            let n = r.value as u64;
            let literal = cartwright_sturmfels_bound(m, r.d)?;
            let sphere = cartwright_sturmfels_sphere_bound(m, r.d)?;
            // Critical points on the sphere come in antipodal pairs; the
            // bound counts pairs.
            if n % 2 != 0 || n / 2 > literal || n > sphere {
                violations += 1;
            }
            if n > literal {
                literal_violations += 1;
            }
        }
    }
    Ok((
        violations == 0 && checked >= 1000,
        format!(
            "{checked} trials (m ∈ {{1,2}}, d ≤ 8), {discarded} discarded, {violations} violations of the pair bound; \
             {literal_violations} raw sphere counts exceed the bound"
        ),
    ))
}

fn criterion_6(seed: u64) -> Result<(bool, String)> {
    let outcomes: Vec<Result<(usize, usize, usize, bool)>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let s = substream_seed(seed, "c6-morse", i);
            let p = sample_kostlan(&KostlanSpec::new(2, 1, 20, s)?);
            let curve = match extract_zero_curve(p.component(0)) {
                Ok(c) => c,
                Err(e) if e.is_degenerate() => return Ok((0, 0, 0, true)),
                Err(e) => return Err(e),
            };
            let mut rng = SimRng::new(derive_seed(s, 6));
            let (mut audits, mut passed, mut degenerate) = (0, 0, 0);
            for _ in 0..20 {
                let v = rng.unit_vector(3);
                match morse_audit(&curve, &[v[0], v[1], v[2]]) {
                    Ok(a) => {
                        audits += 1;
                        passed += a.pass as usize;
                    }
                    Err(Error::DegenerateDirection(_)) => degenerate += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((audits, passed, degenerate, false))
        })
        .collect();
    let (mut audits, mut passed, mut degenerate, mut discarded) = (0, 0, 0, 0);
    for o in outcomes {
        let (a, p, g, disc) = o?;
        audits += a;
        passed += p;
        degenerate += g;
        discarded += disc as usize;
    }
    Ok((
        audits > 0 && passed == audits,
        format!(
            "{passed}/{audits} non-degenerate audits pass b0 ≤ #Crit/2; {degenerate} degenerate directions; \
             {discarded} curves discarded"
        ),
    ))
}

fn criterion_7(seed: u64) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, d, target) in [(1usize, 20u32, 200usize), (2, 16, 100)] {
        // Enough trials for the target acceptance count at the 5% discard limit.
        let trials = (target as f64 / 0.95).ceil() as usize;
        let mut cfg = config(ExperimentKind::Semicont, &format!("c7-semicont-s{m}"), (m, 1), &[d], trials, seed);
        cfg.max_discard_rate = 1.0;
        let records = run_experiment(&cfg)?;
        let accepted: Vec<&TrialRecord> = records.iter().filter(|r| !r.discarded).collect();
        let violations = accepted.iter().filter(|r| r.value < 0.0).count();
        let rate = (records.len() - accepted.len()) as f64 / records.len() as f64;
        let ok = accepted.len() >= target && violations == 0 && rate < 0.05;
        pass &= ok;
        parts.push(format!(
            "S^{m} d={d}: {} accepted, {violations} decreases, discard rate {:.3}",
            accepted.len(),
            rate
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn criterion_8(seed: u64) -> Result<(bool, String)> {
    let degrees = [8u32, 32, 128, 512];
    let records = run_experiment(&config(ExperimentKind::Coupled, "c8-coupled", (2, 1), &degrees, 50, seed))?;
    let medians: Vec<f64> = degrees
        .iter()
        .map(|&d| median(records.iter().filter(|r| r.d == d && !r.discarded).map(|r| r.value).collect()))
        .collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let ratio = medians[3] / medians[0];
    Ok((
        decreasing && ratio < 0.25,
        format!(
            "median sup gaps {}; d=512/d=8 ratio {ratio:.4} (want < 0.25)",
            degrees
                .iter()
                .zip(&medians)
                .map(|(d, m)| format!("d={d} {m:.4e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

fn criterion_9(seed: u64) -> Result<(bool, String)> {
    let d = 6u32;
    let mut rng = SimRng::new(derive_seed(seed, 9));
    let mut worst: f64 = 0.0;
    for pair in 0..5u64 {
        let x = rng.unit_vector(3);
        let y = rng.unit_vector(3);
        let spec = KostlanSpec::new(2, 1, d, substream_seed(seed, "c9-covariance", pair))?;
        let est = empirical_covariance(&spec, &x, &y, 20_000)?;
        let exact = crate::geom::dot(&x, &y).powi(d as i32);
        worst = worst.max((est.mean[(0, 0)] - exact).abs() / est.stderr[(0, 0)]);
    }
    // Mean zero count of m = k = 2, d = 9 maps in a cap of angular radius
    // 60° about a pole, compared across rotated poles.
    let cap_mean = |pole: &[f64], id: &str| -> Result<(f64, f64)> {
        let counts: Vec<Result<f64>> = (0..400u64)
            .into_par_iter()
            .map(|i| {
                let p = sample_kostlan(&KostlanSpec::new(2, 2, 9, substream_seed(seed, id, i))?);
                let zeros = find_singular_points(&p, SingularityClass::ZeroSet(2))?;
                Ok(zeros.points.iter().filter(|z| crate::geom::dot(&z.x, pole) >= 0.5).count() as f64)
            })
            .collect();
        Ok(mean_and_se(&counts.into_iter().collect::<Result<Vec<_>>>()?))
    };
    let (base, base_se) = cap_mean(&[0.0, 0.0, 1.0], "c9-rotation-base")?;
    let mut rot_ok = true;
    let mut parts = vec![format!("base cap {base:.3}±{base_se:.3}")];
    for r in 0..3 {
        let q = rng.orthogonal_matrix(3);
        let pole = [q[0][2], q[1][2], q[2][2]];
        let (m, se) = cap_mean(&pole, &format!("c9-rotation-{r}"))?;
        let ok = (m - base).abs() < 3.0 * (se * se + base_se * base_se).sqrt();
        rot_ok &= ok;
        parts.push(format!("rotation {r} {m:.3}±{se:.3}"));
    }
    Ok((
        worst < 5.0 && rot_ok,
        format!(
            "covariance: worst deviation {worst:.2} SE over 5 pairs (limit 5); {}",
            parts.join(", ")
        ),
    ))
}

fn criterion_10(seed: u64) -> Result<(bool, String)> {
    let kernel = KernelSpec::new(KernelKind::RescaledKostlan(25), 1, 1)?;
    let e = integrate_expected_count(
        SingularityClass::ZeroSet(1),
        &kernel,
        Region::Sphere,
        1,
        1_000_000,
        derive_seed(seed, 10),
    )?;
    let integral_ok = (e.value - 10.0).abs() < 0.1;
    let bf = KernelSpec::new(KernelKind::BargmannFock, 1, 1)?;
    let rho = kac_rice_density(SingularityClass::ZeroSet(1), &bf, &[0.0], 100_000, derive_seed(seed, 11))?;
    let target = 1.0 / std::f64::consts::PI;
    let density_ok = (rho.value - target).abs() < 3.0 * rho.stderr;
    // Crossings of sampled Bargmann–Fock fields on [-1, 1], per unit length.
    let order = default_truncation_order(1);
    let n = 2000;
    let counts: Vec<Result<f64>> = (0..3000u64)
        .into_par_iter()
        .map(|i| {
            let x = BargmannFockField::sample(1, 1, order, substream_seed(seed, "c10-crossings", i))?;
            let mut prev = x.value(&[-1.0])?[0];
            let mut c = 0usize;
            for j in 1..=n {
                let v = x.value(&[-1.0 + 2.0 * j as f64 / n as f64])?[0];
                c += ((v < 0.0) != (prev < 0.0)) as usize;
                prev = v;
            }
            Ok(c as f64 / 2.0)
        })
        .collect();
    let (oracle, oracle_se) = mean_and_se(&counts.into_iter().collect::<Result<Vec<_>>>()?);
    let oracle_ok = (oracle - rho.value).abs() < 3.0 * (oracle_se * oracle_se + rho.stderr * rho.stderr).sqrt();
    Ok((
        integral_ok && density_ok && oracle_ok,
        format!(
            "∫ρ on S¹ at d=25: {:.4}±{:.4} (want 10 within 1%); ρ_BF(0) {:.5}±{:.5} vs 1/π {:.5}; \
             crossing oracle {:.5}±{:.5}",
            e.value, e.stderr, rho.value, rho.stderr, target, oracle, oracle_se
        ),
    ))
}

fn criterion_11(seed: u64) -> Result<(bool, String)> {
    let c = sqrt_law_constant(SingularityClass::ZeroSet(1), &SqrtLawConfig::new(1, 4000, derive_seed(seed, 11)))?;
    let records = run_experiment(&config(ExperimentKind::Zeros, "c11-holdout", (1, 1), &[400], 1000, seed))?;
    let (mean, se) = mean_se(&degree_stats(&records)?[0]);
    let predicted = c.value * 20.0;
    let combined = (se * se + (20.0 * c.stderr).powi(2)).sqrt();
    Ok((
        (predicted - mean).abs() < 3.0 * combined,
        format!(
            "C_W {:.4}±{:.4} predicts {predicted:.3} at d=400; empirical {mean:.3}±{se:.3}",
            c.value, c.stderr
        ),
    ))
}

fn criterion_12(seed: u64) -> Result<(bool, String)> {
    const BATCH: usize = 300;
    let degrees = [16u32, 64, 256];
    let mut near = Vec::new();
    let mut far = Vec::new();
    let mut discarded = 0;
    for batch in 0..5 {
        let hists: Vec<Histogram> = degrees
            .iter()
            .map(|&d| {
                let run = betti_histogram(
                    |i| {
                        let s = substream_seed(seed, "c12-betti", (batch * BATCH + i) as u64);
                        let pair = sample_coupled(2, 1, default_truncation_order(2), s)?;
                        Ok(disk_interior_b0(&pair, Degree::Finite(d))?.interior_b0)
                    },
                    BATCH,
                )?;
                discarded += run.discarded;
                Ok(run.histogram)
            })
            .collect::<Result<_>>()?;
        far.push(tv_distance(&hists[0], &hists[1]));
        near.push(tv_distance(&hists[1], &hists[2]));
    }
    let (m_far, m_near) = (median(far), median(near));
    Ok((
        m_near < m_far,
        format!(
            "median tv(16,64) {m_far:.4}, median tv(64,256) {m_near:.4} over 5 batches of {BATCH}; {discarded} discarded"
        ),
    ))
}

fn criterion_13(seed: u64) -> Result<(bool, String)> {
    const TRIALS: u64 = 500;
    let run = |d: u32| -> Result<(Vec<usize>, usize, usize)> {
        let outcomes: Vec<Result<Option<(usize, bool)>>> = (0..TRIALS)
            .into_par_iter()
            .map(|i| {
                let s = substream_seed(seed, "c13-knots", i);
                match sample_knot(d, min_knot_points(d), s) {
                    Ok(k) => Ok(Some((k.crossings, k.min_distance > EMBEDDING_FLOOR))),
                    Err(e) if e.is_degenerate() => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let (mut crossings, mut failed, mut discarded) = (Vec::new(), 0, 0);
        for o in outcomes {
            match o? {
                Some((c, ok)) => {
                    crossings.push(c);
                    failed += (!ok) as usize;
                }
                None => discarded += 1,
            }
        }
        Ok((crossings, failed, discarded))
    };
    let (c12, _, _) = run(12)?;
    let (c50, failed, discarded) = run(50)?;
    let (c100, _, _) = run(100)?;
    let h = |c: Vec<usize>| Histogram::from_values(c);
    let rate = discarded as f64 / TRIALS as f64;
    let (far, near) = (tv_distance(&h(c12), &h(c50.clone())), tv_distance(&h(c50), &h(c100)));
    Ok((
        failed == 0 && rate < 0.01 && near < far,
        format!(
            "d=50: {failed} audit failures, discard rate {rate:.3}; tv(12,50) {far:.4}, tv(50,100) {near:.4}"
        ),
    ))
}
