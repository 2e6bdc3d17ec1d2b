//! Parallel driver for the seeded verification suites.

use geokit_core::verify::{run_trial, Summary, TheoremId, TrialOutcome};
use geokit_core::Tol;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Same result as [`geokit_core::verify::run`], with trials spread over threads.
pub fn run_parallel(id: TheoremId, trials: usize, seed: u64, nmax: usize, tol: Tol) -> Summary {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(id, i, seed, nmax, tol))
        .collect();
    Summary::from_outcomes(id, &outcomes)
}

pub fn summary_json(s: &Summary) -> Value {
    json!({
        "id": s.id.name(),
        "trials": s.trials,
        "passed": s.passed,
        "failed": s.failed,
        "first_failing_seed": s.first_failing_seed,
        "first_failure": s.first_failure,
    })
}
