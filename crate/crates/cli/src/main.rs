use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use singulab_core::xplab::acceptance::{
    run_criterion, CriterionOutcome, ACCEPTANCE_SEED, CRITERION_COUNT,
};
use singulab_core::xplab::{
    emit_report, parse_records_csv, run_experiment, scaling_fit, summarize, ExperimentConfig,
    ExperimentKind, ReportFormat, TrialRecord,
};
use singulab_core::Error;

const EXIT_ACCEPTANCE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "singulab", version, about = "Experiments on random Kostlan polynomial maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "SINGULAB_THREADS")]
    threads: Option<usize>,
    /// Output directory for reports; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Inline experiment settings, used when no config file is given.
#[derive(Args, Debug, Default)]
struct Inline {
    #[arg(short, long)]
    m: Option<usize>,
    #[arg(short, long)]
    k: Option<usize>,
    /// Degree; repeat for several.
    #[arg(short, long = "degree")]
    d: Vec<u32>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero counts of random maps on S^m.
    Zeros(Inline),
    /// Critical-point counts of random functions.
    Crit(Inline),
    /// Local-minimum counts of random functions.
    Minima(Inline),
    /// Fold-curve components of random maps S² → R².
    Fold(Inline),
    /// Whitney cusp counts of random maps S² → R².
    Cusp(Inline),
    /// Zero-set components of random functions.
    Components(Inline),
    /// Component-count change under small perturbations.
    Semicont(Inline),
    /// Sup distance between coupled rescaled and limit fields on the unit disk.
    Coupled(Inline),
    /// Crossing counts of random knots.
    Knot(Inline),
    /// Kac–Rice expected zero counts on the sphere.
    Kacrice(Inline),
    /// Zero counts across degrees with a log-log scaling fit.
    Scaling(Inline),
    /// Rebuild JSON and SVG summaries from a records CSV.
    Report {
        /// Records CSV written by an experiment run.
        input: PathBuf,
        /// Statistic to fit; defaults to the one in the records.
        #[arg(long)]
        statistic: Option<String>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Criterion number; repeat for several. Defaults to all.
        #[arg(long)]
        criterion: Vec<usize>,
    },
}

fn kind_of(command: &Command) -> Option<(ExperimentKind, &Inline)> {
    let kind = match command {
        Command::Zeros(i) => (ExperimentKind::Zeros, i),
        Command::Crit(i) => (ExperimentKind::Crit, i),
        Command::Minima(i) => (ExperimentKind::Minima, i),
        Command::Fold(i) => (ExperimentKind::Fold, i),
        Command::Cusp(i) => (ExperimentKind::Cusp, i),
        Command::Components(i) => (ExperimentKind::Components, i),
        Command::Semicont(i) => (ExperimentKind::Semicont, i),
        Command::Coupled(i) => (ExperimentKind::Coupled, i),
        Command::Knot(i) => (ExperimentKind::Knot, i),
        Command::Kacrice(i) => (ExperimentKind::Kacrice, i),
        Command::Scaling(i) => (ExperimentKind::Scaling, i),
        Command::Report { .. } | Command::Verify { .. } => return None,
    };
    Some(kind)
}

fn config_error(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line: 0,
        key: key.to_string(),
        message: message.into(),
    }
}

fn build_config(cli: &Cli, kind: ExperimentKind, inline: &Inline) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let cfg = ExperimentConfig::parse(&text)?;
            if cfg.kind != kind {
                return Err(config_error(
                    "experiment",
                    format!("config describes a {} experiment, not {kind}", cfg.kind),
                )
                .into());
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(m) = inline.m {
        cfg.m = m;
        let k_follows_m = matches!(
            kind,
            ExperimentKind::Zeros | ExperimentKind::Scaling | ExperimentKind::Kacrice
        );
        if inline.k.is_none() && cli.config.is_none() && k_follows_m {
            cfg.k = m;
        }
    }
    if let Some(k) = inline.k {
        cfg.k = k;
    }
    if !inline.d.is_empty() {
        cfg.degrees = inline.d.clone();
    }
    if let Some(t) = inline.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(records: &[TrialRecord], statistic: &str, fit_required: bool) -> Result<()> {
    let fit = match scaling_fit(records, statistic) {
        Ok(f) => Some(f),
        Err(e) if fit_required => return Err(e.into()),
        Err(_) => None,
    };
    let summary = summarize(records, fit.as_ref())?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{} ({statistic})", summary.experiment_id)?;
    for g in &summary.degrees {
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
        writeln!(
            out,
            "  d={:<5} trials={:<6} mean={} se={} discarded={} ({:.2}%)",
            g.d,
            g.trials,
            fmt(g.mean),
            fmt(g.stderr),
            g.discarded,
            100.0 * g.discard_rate
        )?;
    }
    if let Some(f) = &summary.fit {
        writeln!(
            out,
            "  log-log slope {:.6} ± {:.6}, intercept {:.6}, R² {:.6}",
            f.slope, f.slope_stderr, f.intercept, f.r_squared
        )?;
    }
    Ok(())
}

fn write_reports(
    records: &[TrialRecord],
    statistic: &str,
    formats: &[ReportFormat],
    dir: &Path,
) -> Result<()> {
    let fit = scaling_fit(records, statistic).ok();
    for &format in formats {
        let path = emit_report(records, fit.as_ref(), format, dir)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_kind(cli: &Cli, kind: ExperimentKind, inline: &Inline) -> Result<ExitCode> {
    let mut cfg = build_config(cli, kind, inline)?;
    if kind == ExperimentKind::Scaling && !cfg.formats.contains(&ReportFormat::Svg) {
        cfg.formats.push(ReportFormat::Svg);
    }
    let records = run_experiment(&cfg)?;
    let statistic = kind.statistic();
    print_summary(&records, statistic, kind == ExperimentKind::Scaling)?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    write_reports(&records, statistic, &cfg.formats, &dir)?;
    Ok(ExitCode::SUCCESS)
}

fn report(cli: &Cli, input: &Path, statistic: Option<&str>) -> Result<ExitCode> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let records = parse_records_csv(&text)?;
    let Some(first) = records.first() else {
        bail!("{} has no records", input.display());
    };
    let statistic = statistic.unwrap_or(&first.statistic).to_string();
    print_summary(&records, &statistic, false)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_reports(&records, &statistic, &[ReportFormat::Json, ReportFormat::Svg], &dir)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, criteria: &[usize]) -> Result<ExitCode> {
    let seed = cli.seed.unwrap_or(ACCEPTANCE_SEED);
    let list: Vec<usize> = if criteria.is_empty() {
        (1..=CRITERION_COUNT).collect()
    } else {
        criteria.to_vec()
    };
    if let Some(bad) = list.iter().find(|&&n| n == 0 || n > CRITERION_COUNT) {
        return Err(config_error("criterion", format!("no criterion {bad}")).into());
    }
    let mut outcomes: Vec<CriterionOutcome> = Vec::new();
    for n in list {
        let outcome = run_criterion(n, seed).unwrap_or_else(|e| CriterionOutcome {
            number: n,
            title: singulab_core::xplab::acceptance::criterion_title(n).to_string(),
            pass: false,
            detail: format!("error: {e}"),
            seconds: 0.0,
        });
        println!("{outcome}");
        outcomes.push(outcome);
    }
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("acceptance.json");
        std::fs::write(&path, serde_json::to_string_pretty(&outcomes)?)?;
        eprintln!("wrote {}", path.display());
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_error("threads", "thread count must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Report { input, statistic } => report(cli, input, statistic.as_deref()),
        Command::Verify { criterion } => verify(cli, criterion),
        command => {
            let (kind, inline) = kind_of(command).expect("experiment subcommand");
            run_kind(cli, kind, inline)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e
                .downcast_ref::<Error>()
                .is_some_and(|e| matches!(e, Error::Config { .. }));
            ExitCode::from(if config { EXIT_CONFIG } else { 1 })
        }
    }
}
