//! Seeded, parallel Monte Carlo experiments.
//!
//! Trials are independent pure functions of `(master_seed, trial_index)`.
//! They are fanned out over a rayon pool and collected in index order, and
//! every aggregate is a sequential reduction over that ordered vector, so a
//! summary is bit-identical for any thread count.

mod experiment;
mod overshoot;
mod sweep;
mod tail;

pub use experiment::{
    run_experiment, run_experiment_with, simulate_trials, summarize, ExperimentSummary, Verdict, MIN_TRIALS,
};
pub use overshoot::{summarize_overshoot, CrossingSpread, OvershootSummary, OvershootVerdicts};
pub use sweep::{sweep, SweepPoint, SweepRow};
pub use tail::{log_checkpoints, tail_exponent_estimate, TailCheckResult, TruncatedMoment};

use rayon::prelude::*;

use crate::bounds::LowerBoundVariant;
use crate::{Error, Result};

/// Maximum fraction of censored trials before an experiment is invalid.
pub const CENSORING_BUDGET: f64 = 0.001;

/// Standard-error multiple used by the one-sided bound checks.
pub const SE_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub lower_bound_variant: LowerBoundVariant,
}

impl RunOptions {
    pub fn threads(mut self, n: usize) -> Self {
        self.threads = Some(n);
        self
    }
}

/// `f(0), ..., f(n - 1)` evaluated in parallel, returned in index order.
pub(crate) fn par_collect<T, F>(n: u64, opts: &RunOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
    match opts.threads {
        None => Ok(run()),
        Some(0) => Err(Error::Config("thread count must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}
