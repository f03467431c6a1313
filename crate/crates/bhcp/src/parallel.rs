//! Sweep execution across threads. Each cell draws its noise from its own
//! `(seed, cell index)` stream, so the thread count never changes a result.

use bhcp_core::benchmarks::{run_cell, BenchmarkProblem, SweepCell};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::memo::MemoizedProfile;

pub const THREADS_VAR: &str = "BHCP_THREADS";

/// Thread cap from `BHCP_THREADS`: `Some(0)` means serial, `None` means the
/// rayon default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_VAR}={v} is not a non-negative integer"))),
        Err(_) => Ok(None),
    }
}

pub fn run_sweep(
    problem: &BenchmarkProblem,
    epsilons: &[f64],
    levels: &[u32],
    t: f64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<SweepCell>> {
    if epsilons.is_empty() || levels.is_empty() {
        return Err(CliError::Usage("sweep needs at least one epsilon and one level".into()));
    }
    let profile = MemoizedProfile::new(problem.profile().clone());
    let cells = epsilons.len() * levels.len();
    let one = |c: usize| run_cell(problem, &profile, levels, epsilons, c, t, seed).map_err(CliError::from);
    match threads {
        Some(0) => (0..cells).map(one).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| (0..cells).into_par_iter().map(one).collect())
        }
        None => (0..cells).into_par_iter().map(one).collect(),
    }
}
