use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::runner::TrialRecord;
use crate::error::{Error, Result};

/// Ordinary least squares of `ln mean` on `ln d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// From the residuals; zero for an exact power law or three points on
    /// a line.
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub degrees: Vec<u32>,
}

impl ScalingFit {
    /// `exp(intercept) · d^slope`.
    pub fn predict(&self, d: f64) -> f64 {
        (self.intercept + self.slope * d.ln()).exp()
    }
}

/// Per-degree means of the accepted values of `statistic`.
pub fn degree_means(records: &[TrialRecord], statistic: &str) -> Vec<(u32, f64)> {
    let mut groups: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.statistic == statistic && !r.discarded) {
        let e = groups.entry(r.d).or_insert((0.0, 0));
        e.0 += r.value;
        e.1 += 1;
    }
    groups.into_iter().map(|(d, (s, n))| (d, s / n as f64)).collect()
}

/// Log-log fit of `(d, mean)` pairs; needs at least three degrees and
/// positive means.
pub fn scaling_fit_means(means: &[(u32, f64)]) -> Result<ScalingFit> {
    if means.len() < 3 {
        return Err(Error::invalid(format!(
            "scaling fits need at least three degrees, got {}",
            means.len()
        )));
    }
    if let Some((d, v)) = means.iter().find(|(d, v)| !(*v > 0.0) || *d == 0) {
        return Err(Error::invalid(format!("mean {v} at d = {d} is not positive")));
    }
    let n = means.len() as f64;
    let xs: Vec<f64> = means.iter().map(|(d, _)| (*d as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("scaling fit needs distinct degrees"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    Ok(ScalingFit {
        slope,
        intercept,
        slope_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        r_squared: if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 },
        degrees: means.iter().map(|(d, _)| *d).collect(),
    })
}

/// Log-log fit of the per-degree means of `statistic`.
pub fn scaling_fit(records: &[TrialRecord], statistic: &str) -> Result<ScalingFit> {
    scaling_fit_means(&degree_means(records, statistic))
}
