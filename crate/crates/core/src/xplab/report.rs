use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ReportFormat;
use super::fit::ScalingFit;
use super::runner::TrialRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment_id,m,k,d,trial,seed,statistic,value,discarded,runtime_ms";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub d: u32,
    pub trials: usize,
    pub discarded: usize,
    pub discard_rate: f64,
    /// `None` when every trial was discarded.
    pub mean: Option<f64>,
    /// `None` with fewer than two accepted trials.
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment_id: String,
    pub statistic: String,
    pub m: usize,
    pub k: usize,
    pub degrees: Vec<DegreeSummary>,
    pub fit: Option<ScalingFit>,
}

/// Per-degree statistics over accepted trials.
pub fn summarize(records: &[TrialRecord], fit: Option<&ScalingFit>) -> Result<ExperimentSummary> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("no records to summarize"))?;
    let mut groups: BTreeMap<u32, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.d).or_default().push(r);
    }
    let degrees = groups
        .into_iter()
        .map(|(d, rs)| {
            let vals: Vec<f64> = rs.iter().filter(|r| !r.discarded).map(|r| r.value).collect();
            let n = vals.len();
            let mean = (n > 0).then(|| vals.iter().sum::<f64>() / n as f64);
            let stderr = mean.filter(|_| n > 1).map(|mu| {
                let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            });
            DegreeSummary {
                d,
                trials: rs.len(),
                discarded: rs.len() - n,
                discard_rate: (rs.len() - n) as f64 / rs.len() as f64,
                mean,
                stderr,
            }
        })
        .collect();
    Ok(ExperimentSummary {
        experiment_id: first.experiment_id.clone(),
        statistic: first.statistic.clone(),
        m: first.m,
        k: first.k,
        degrees,
        fit: fit.cloned(),
    })
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let value = if r.value.is_nan() { "nan".to_string() } else { format!("{}", r.value) };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.experiment_id, r.m, r.k, r.d, r.trial, r.seed, r.statistic, value, r.discarded, r.runtime_ms
        );
    }
    s
}

/// Self-contained log-log scatter of per-degree means with the fitted line.
pub fn summary_svg(summary: &ExperimentSummary) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 60.0;
    let pts: Vec<(f64, f64)> = summary
        .degrees
        .iter()
        .filter_map(|g| g.mean.filter(|m| *m > 0.0).map(|m| ((g.d as f64).ln(), m.ln())))
        .collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if let Some(fit) = &summary.fit {
        for x in xs.clone() {
            ys.push(fit.intercept + fit.slope * x);
        }
    }
    if xs.is_empty() {
        xs.push(0.0);
        ys.push(0.0);
    }
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = ((hi - lo) * 0.1).max(0.1);
        (lo - pad, hi + pad)
    };
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{} ({}, m={}, k={})</text>"#,
        summary.statistic, summary.experiment_id, summary.m, summary.k
    );
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{:.2}" stroke="black"/>"#,
        H - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">log d</text>"#,
        W / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" font-family="sans-serif" font-size="12" transform="rotate(-90 15 {:.2})" text-anchor="middle">log mean</text>"#,
        H / 2.0,
        H / 2.0
    );
    for g in &summary.degrees {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            sx((g.d as f64).ln()),
            H - PAD + 14.0,
            g.d
        );
    }
    if let Some(fit) = &summary.fit {
        let _ = writeln!(
            s,
            r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="2"/>"#,
            sx(x0),
            sy(fit.intercept + fit.slope * x0),
            sx(x1),
            sy(fit.intercept + fit.slope * x1)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">slope {:.4} ± {:.4}, R² {:.4}</text>"#,
            W - PAD - 220.0,
            PAD - 10.0,
            fit.slope,
            fit.slope_stderr,
            fit.r_squared
        );
    }
    for (x, y) in &pts {
        let _ = writeln!(
            s,
            r#"<circle class="mean" cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<experiment_id>.<ext>` into `dir`. An empty record set is an
/// error and writes nothing.
pub fn emit_report(
    records: &[TrialRecord],
    fit: Option<&ScalingFit>,
    format: ReportFormat,
    dir: &Path,
) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(Error::invalid("no records to report"));
    }
    let body = match format {
        ReportFormat::Csv => records_csv(records),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&summarize(records, fit)?)?;
            s.push('\n');
            s
        }
        ReportFormat::Svg => summary_svg(&summarize(records, fit)?),
    };
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.{}", records[0].experiment_id, format.extension()));
    fs::write(&path, body)?;
    Ok(path)
}

/// Parses a CSV written by [`records_csv`].
pub fn parse_records_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::invalid("records CSV must start with the standard header")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::invalid(format!("records CSV line {}: bad {what}", i + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(bad("field count"));
        }
        out.push(TrialRecord {
            experiment_id: f[0].to_string(),
            m: f[1].parse().map_err(|_| bad("m"))?,
            k: f[2].parse().map_err(|_| bad("k"))?,
            d: f[3].parse().map_err(|_| bad("d"))?,
            trial: f[4].parse().map_err(|_| bad("trial"))?,
            seed: f[5].parse().map_err(|_| bad("seed"))?,
            statistic: f[6].to_string(),
            value: if f[7] == "nan" { f64::NAN } else { f[7].parse().map_err(|_| bad("value"))? },
            discarded: f[8].parse().map_err(|_| bad("discarded"))?,
            runtime_ms: f[9].parse().map_err(|_| bad("runtime_ms"))?,
        });
    }
    Ok(out)
}
