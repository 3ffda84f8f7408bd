//! Experiment runner: configuration, seeded parallel trials, scaling fits,
//! reports and the acceptance checks.

pub mod acceptance;
mod config;
mod fit;
mod report;
mod runner;

pub use config::{
    ExperimentConfig, ExperimentKind, ReportFormat, Resolution, DEFAULT_MAX_DISCARD_RATE,
    DISCARD_CHECK_MAX_DEGREE,
};
pub use fit::{degree_means, scaling_fit, scaling_fit_means, ScalingFit};
pub use report::{
    emit_report, parse_records_csv, records_csv, summarize, summary_svg, DegreeSummary, ExperimentSummary, CSV_HEADER,
};
pub use runner::{
    coupled_sup_gap, run_experiment, run_experiment_with_threads, semicont_spec, trial_statistic,
    TrialRecord, COUPLED_GRID, DEFAULT_MC_SAMPLES,
};
