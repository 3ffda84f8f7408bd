use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::betti::{betti_of, BettiSummary, ReferenceDisk};
use crate::error::{Error, Result};
use crate::fields::{CoupledPair, Degree};
use crate::singulab::extract_planar_curve;

pub const MIN_HISTOGRAM_TRIALS: usize = 200;

/// Half-width of the square on which disk statistics are extracted; the
/// margin beyond the unit disk keeps boundary-touching components open.
pub const DISK_HALF_WIDTH: f64 = 1.1;

/// Marching-squares cell size for disk statistics.
pub const DISK_CELL_SIZE: f64 = 0.025;

/// Empirical distribution of an integer statistic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: BTreeMap<usize, usize>,
    total: usize,
}

impl Histogram {
    pub fn from_values(values: impl IntoIterator<Item = usize>) -> Self {
        let mut h = Self::default();
        for v in values {
            h.push(v);
        }
        h
    }

    pub fn push(&mut self, value: usize) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn probability(&self, value: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(&value).copied().unwrap_or(0) as f64 / self.total as f64
    }

    /// `(value, count)` in increasing value order.
    pub fn bins(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.bins().map(|(v, c)| (v * c) as f64).sum::<f64>() / self.total as f64
    }

    /// Plain-text `count probability` rows.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (v, _) in self.bins() {
            s.push_str(&format!("{v} {:.17e}\n", self.probability(v)));
        }
        s
    }
}

/// Half the L¹ distance between the normalized histograms.
pub fn tv_distance(a: &Histogram, b: &Histogram) -> f64 {
    let mut keys: Vec<usize> = a.counts.keys().chain(b.counts.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|&k| (a.probability(k) - b.probability(k)).abs())
        .sum::<f64>()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramRun {
    pub histogram: Histogram,
    pub discarded: usize,
}

/// Histogram of `sampler(trial)` over `trials` trials; degenerate samples are
/// discarded and counted.
pub fn betti_histogram<F>(sampler: F, trials: usize) -> Result<HistogramRun>
where
    F: Fn(usize) -> Result<usize> + Sync,
{
    if trials < MIN_HISTOGRAM_TRIALS {
        return Err(Error::invalid(format!(
            "histograms need at least {MIN_HISTOGRAM_TRIALS} trials, got {trials}"
        )));
    }
    let outcomes: Vec<Result<usize>> = (0..trials).into_par_iter().map(&sampler).collect();
    let mut histogram = Histogram::default();
    let mut discarded = 0;
    for o in outcomes {
        match o {
            Ok(v) => histogram.push(v),
            Err(e) if e.is_degenerate() => discarded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(HistogramRun {
        histogram,
        discarded,
    })
}

/// Betti summary of the zero set of the first component of a coupled view
/// relative to the unit disk.
pub fn disk_interior_b0(pair: &CoupledPair, degree: Degree) -> Result<BettiSummary> {
    if pair.m() != 2 {
        return Err(Error::invalid("disk statistics need m = 2"));
    }
    let view = pair.view(degree);
    let curve = extract_planar_curve(&view, 0, DISK_HALF_WIDTH, DISK_CELL_SIZE)?;
    Ok(betti_of(&curve, Some(&ReferenceDisk::unit())))
}
