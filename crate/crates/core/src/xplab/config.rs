use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discard rate above which a run at `d ≤ 256` fails.
pub const DEFAULT_MAX_DISCARD_RATE: f64 = 0.01;
/// Largest degree at which the discard limit is enforced.
pub const DISCARD_CHECK_MAX_DEGREE: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Zeros,
    Crit,
    Minima,
    Fold,
    Cusp,
    Components,
    Semicont,
    Coupled,
    Knot,
    Kacrice,
    Scaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::Zeros,
        ExperimentKind::Crit,
        ExperimentKind::Minima,
        ExperimentKind::Fold,
        ExperimentKind::Cusp,
        ExperimentKind::Components,
        ExperimentKind::Semicont,
        ExperimentKind::Coupled,
        ExperimentKind::Knot,
        ExperimentKind::Kacrice,
        ExperimentKind::Scaling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Zeros => "zeros",
            ExperimentKind::Crit => "crit",
            ExperimentKind::Minima => "minima",
            ExperimentKind::Fold => "fold",
            ExperimentKind::Cusp => "cusp",
            ExperimentKind::Components => "components",
            ExperimentKind::Semicont => "semicont",
            ExperimentKind::Coupled => "coupled",
            ExperimentKind::Knot => "knot",
            ExperimentKind::Kacrice => "kacrice",
            ExperimentKind::Scaling => "scaling",
        }
    }

    /// Name of the per-trial statistic.
    pub fn statistic(&self) -> &'static str {
        match self {
            ExperimentKind::Zeros | ExperimentKind::Scaling => "zero_count",
            ExperimentKind::Crit => "critical_count",
            ExperimentKind::Minima => "minima_count",
            ExperimentKind::Fold => "fold_b0",
            ExperimentKind::Cusp => "cusp_count",
            ExperimentKind::Components => "b0",
            ExperimentKind::Semicont => "b0_gain",
            ExperimentKind::Coupled => "sup_gap",
            ExperimentKind::Knot => "crossings",
            ExperimentKind::Kacrice => "expected_count",
        }
    }

    fn default_dims(&self, m: usize) -> usize {
        match self {
            ExperimentKind::Zeros | ExperimentKind::Scaling | ExperimentKind::Kacrice => m,
            ExperimentKind::Fold | ExperimentKind::Cusp => 2,
            ExperimentKind::Knot => 3,
            _ => 1,
        }
    }

    fn default_m(&self) -> usize {
        match self {
            ExperimentKind::Fold | ExperimentKind::Cusp | ExperimentKind::Knot => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

/// Optional overrides of the default extraction resolutions. Each applies
/// only to the kinds that use it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Marching-squares cell size (components), in `(0, 0.1]`.
    pub cell_size: Option<f64>,
    /// Point-search grid spacing on S² (zeros, crit, minima), in `(0, 0.1]`.
    pub point_spacing: Option<f64>,
    /// Samples along a knot (knot), at least the degree's minimum.
    pub knot_points: Option<usize>,
    /// Monte Carlo samples per density evaluation (kacrice), in
    /// `[100, 10^7]`.
    pub mc_samples: Option<usize>,
    /// Perturbation amplitude (semicont), in `(0, 1]`; defaults to the
    /// auto amplitude of each baseline.
    pub amplitude: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Svg => "svg",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub id: String,
    pub m: usize,
    pub k: usize,
    /// Strictly increasing.
    pub degrees: Vec<u32>,
    /// Trials per degree, at least 1.
    pub trials: usize,
    pub seed: u64,
    pub resolution: Resolution,
    /// Largest tolerated discard rate at `d ≤ 256`, in `[0, 1]`.
    pub max_discard_rate: f64,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<ReportFormat>,
}

fn config_error(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| config_error(line, key, format!("cannot parse `{value}`: {e}")))
}

fn in_range(line: usize, key: &str, x: f64, lo: f64, hi: f64, lo_open: bool) -> Result<f64> {
    let ok = x.is_finite() && (if lo_open { x > lo } else { x >= lo }) && x <= hi;
    if ok {
        Ok(x)
    } else {
        let open = if lo_open { "(" } else { "[" };
        Err(config_error(line, key, format!("{x} is outside {open}{lo}, {hi}]")))
    }
}

impl ExperimentConfig {
    /// Defaults for `kind`: `m` and `k` from the kind, no degrees, one trial.
    pub fn new(kind: ExperimentKind) -> Self {
        let m = kind.default_m();
        Self {
            kind,
            id: kind.name().to_string(),
            m,
            k: kind.default_dims(m),
            degrees: Vec::new(),
            trials: 1,
            seed: 0,
            resolution: Resolution::default(),
            max_discard_rate: DEFAULT_MAX_DISCARD_RATE,
            out_dir: None,
            formats: vec![ReportFormat::Csv, ReportFormat::Json],
        }
    }

    /// Parses `key = value` lines. `#` starts a comment; `d` may repeat.
    /// Diagnostics carry the 1-based line number and the key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_error(line, content, "expected `key = value`"))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key.is_empty() {
                return Err(config_error(line, "", "empty key"));
            }
            if value.is_empty() {
                return Err(config_error(line, &key, "empty value"));
            }
            if key != "d" && key != "format" {
                if let Some((first, _, _)) = entries.iter().find(|(_, k, _)| *k == key) {
                    return Err(config_error(
                        line,
                        &key,
                        format!("duplicate key (first set on line {first})"),
                    ));
                }
            }
            entries.push((line, key, value));
        }
        let (kind_line, kind) = match entries.iter().find(|(_, k, _)| k == "experiment") {
            Some((l, k, v)) => (*l, parse_value::<ExperimentKind>(*l, k, v)?),
            None => return Err(config_error(0, "experiment", "missing required key")),
        };
        let mut cfg = Self::new(kind);
        let mut k_set = false;
        let mut trials_line = 0;
        let mut formats = Vec::new();
        let mut degree_lines = Vec::new();
        let mut saw_trials = false;
        for (line, key, value) in &entries {
            let (line, key, value) = (*line, key.as_str(), value.as_str());
            match key {
                "experiment" => {}
                "id" => {
                    if !value
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
                    {
                        return Err(config_error(line, key, "id may only use [A-Za-z0-9-_.]"));
                    }
                    cfg.id = value.to_string();
                }
                "m" => cfg.m = parse_value(line, key, value)?,
                "k" => {
                    cfg.k = parse_value(line, key, value)?;
                    k_set = true;
                }
                "d" => {
                    cfg.degrees.push(parse_value(line, key, value)?);
                    degree_lines.push(line);
                }
                "trials" => {
                    cfg.trials = parse_value(line, key, value)?;
                    trials_line = line;
                    saw_trials = true;
                }
                "seed" => cfg.seed = parse_value(line, key, value)?,
                "cell_size" => {
                    let h = parse_value(line, key, value)?;
                    cfg.resolution.cell_size = Some(in_range(line, key, h, 0.0, 0.1, true)?);
                }
                "point_spacing" => {
                    let h = parse_value(line, key, value)?;
                    cfg.resolution.point_spacing = Some(in_range(line, key, h, 0.0, 0.1, true)?);
                }
                "knot_points" => {
                    let n: usize = parse_value(line, key, value)?;
                    if n < 16 {
                        return Err(config_error(line, key, "knot_points must be at least 16"));
                    }
                    cfg.resolution.knot_points = Some(n);
                }
                "mc_samples" => {
                    let n: usize = parse_value(line, key, value)?;
                    in_range(line, key, n as f64, 100.0, 1e7, false)?;
                    cfg.resolution.mc_samples = Some(n);
                }
                "amplitude" => {
                    let a = parse_value(line, key, value)?;
                    cfg.resolution.amplitude = Some(in_range(line, key, a, 0.0, 1.0, true)?);
                }
                "max_discard_rate" => {
                    let r = parse_value(line, key, value)?;
                    cfg.max_discard_rate = in_range(line, key, r, 0.0, 1.0, false)?;
                }
                "out" => cfg.out_dir = Some(PathBuf::from(value)),
                "format" => formats.push(parse_value(line, key, value)?),
                _ => return Err(config_error(line, key, "unknown key")),
            }
        }
        if !formats.is_empty() {
            cfg.formats = formats;
        }
        if !k_set {
            cfg.k = kind.default_dims(cfg.m);
        }
        if !saw_trials {
            return Err(config_error(0, "trials", "missing required key"));
        }
        if cfg.degrees.is_empty() {
            return Err(config_error(0, "d", "at least one degree is required"));
        }
        for (i, w) in cfg.degrees.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(config_error(
                    degree_lines[i + 1],
                    "d",
                    "degrees must be strictly increasing",
                ));
            }
        }
        if cfg.trials < 1 {
            return Err(config_error(trials_line, "trials", "trials must be at least 1"));
        }
        cfg.validate().map_err(|e| match e {
            Error::Config { line: 0, key, message } => {
                let line = entries
                    .iter()
                    .find(|(_, k, _)| *k == key)
                    .map_or(kind_line, |(l, _, _)| *l);
                Error::Config { line, key, message }
            }
            e => e,
        })?;
        Ok(cfg)
    }

    /// Checks the invariants of a programmatically built config. Errors
    /// report line 0.
    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, msg: String| Err(config_error(0, key, msg));
        if self.trials < 1 {
            return err("trials", "trials must be at least 1".into());
        }
        if self.degrees.is_empty() {
            return err("d", "at least one degree is required".into());
        }
        if self.degrees.windows(2).any(|w| w[1] <= w[0]) {
            return err("d", "degrees must be strictly increasing".into());
        }
        if self.degrees[0] < 1 {
            return err("d", "degrees must be at least 1".into());
        }
        if !(self.max_discard_rate >= 0.0 && self.max_discard_rate <= 1.0) {
            return err("max_discard_rate", "must lie in [0, 1]".into());
        }
        if !(1..=2).contains(&self.m) {
            return err("m", format!("m = {} is not supported (1 or 2)", self.m));
        }
        let (m, k) = (self.m, self.k);
        let kind = self.kind;
        let need = |cond: bool, key: &str, what: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                err(key, format!("{kind} experiments need {what} (got m = {m}, k = {k})"))
            }
        };
        match kind {
            ExperimentKind::Zeros | ExperimentKind::Scaling | ExperimentKind::Kacrice => {
                need(k == m, "k", "k = m")?
            }
            ExperimentKind::Crit
            | ExperimentKind::Minima
            | ExperimentKind::Components
            | ExperimentKind::Semicont => need(k == 1, "k", "k = 1")?,
            ExperimentKind::Fold | ExperimentKind::Cusp => need(m == 2 && k == 2, "m", "m = k = 2")?,
            ExperimentKind::Knot => need(m == 2 && k == 3, "m", "m = 2, k = 3")?,
            ExperimentKind::Coupled => need(k >= 1, "k", "k >= 1")?,
        }
        if kind == ExperimentKind::Scaling && self.degrees.len() < 3 {
            return err("d", "scaling fits need at least three degrees".into());
        }
        if kind == ExperimentKind::Knot {
            if let Some(n) = self.resolution.knot_points {
                let top = *self.degrees.last().unwrap();
                let need = crate::singulab::min_knot_points(top);
                if n < need {
                    return err("knot_points", format!("d = {top} needs at least {need} points"));
                }
            }
        }
        Ok(())
    }
}
