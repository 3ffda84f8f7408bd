//! Runs every acceptance criterion at full scale and prints one line each.

use std::io::Write;

use singulab_core::xplab::acceptance::{run_all, ACCEPTANCE_SEED, CRITERION_COUNT};

#[test]
fn acceptance_criteria() {
    let outcomes = run_all(ACCEPTANCE_SEED);
    assert_eq!(outcomes.len(), CRITERION_COUNT);
    // Written to the process stdout so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{o}").unwrap();
    }
    out.flush().unwrap();
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
