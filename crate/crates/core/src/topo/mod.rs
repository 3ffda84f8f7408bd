//! Topological invariants of extracted singularities: Betti summaries, the
//! Morse audit of height functions on curves, C⁰-perturbation trials and
//! histograms of component counts.

mod betti;
mod histogram;
mod morse;
mod semicont;

pub use betti::{betti_of, BettiSource, BettiSummary, ReferenceDisk, ENDPOINT_TOLERANCE};
pub use histogram::{
    betti_histogram, disk_interior_b0, tv_distance, Histogram, HistogramRun,
    DISK_CELL_SIZE, DISK_HALF_WIDTH, MIN_HISTOGRAM_TRIALS,
};
pub use morse::{morse_audit, morse_audit_generic, MorseAudit, DIRECTION_FLOOR};
pub use semicont::{
    auto_amplitude, semicontinuity_trial, Perturbation, PerturbationMode, PerturbationSpec,
    SemicontinuityTrial, SUP_CHECK_NODES,
};
