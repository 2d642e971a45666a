use serde::{Deserialize, Serialize};

use super::{par_collect, RunOptions, CENSORING_BUDGET};
use crate::bounds::{bound_report, BoundReport, LowerBoundVariant};
use crate::model::{EstimatorConfig, WalkParams};
use crate::path::{simulate, TrialOutcome};
use crate::stats::MeanEstimate;
use crate::{Error, Result};

/// Smallest experiment accepted by [`run_experiment`].
pub const MIN_TRIALS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The 99% interval for `E|eta - tau|` lies inside `[lower, upper]`.
    InsideBracket,
    BelowLower,
    AboveUpper,
    /// More than 0.1% of the trials hit the horizon.
    InvalidCensoring,
    /// The bound hypotheses fail for these parameters (e.g. `eps = 0`).
    NoBracket,
}

/// Aggregates over the uncensored trials of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub n_trials: u64,
    pub n_censored: u64,
    pub mean_abs_dev: f64,
    /// Normal-approximation 99% half-width for `mean_abs_dev`.
    pub ci_halfwidth_abs_dev: f64,
    pub mean_pos_dev: f64,
    pub mean_signed_dev: f64,
    pub signed_dev_stderr: f64,
    /// Empirical `P(eta < tau)`.
    pub prob_eta_early: f64,
    pub mean_overshoot: f64,
    pub mean_sq_overshoot: f64,
    pub mean_tau: f64,
    pub tau_stderr: f64,
    pub mean_eta: f64,
    pub bound_report: BoundReport,
    pub verdict: Verdict,
}

impl ExperimentSummary {
    pub fn abs_dev_interval(&self) -> (f64, f64) {
        (
            self.mean_abs_dev - self.ci_halfwidth_abs_dev,
            self.mean_abs_dev + self.ci_halfwidth_abs_dev,
        )
    }

    pub fn censored_fraction(&self) -> f64 {
        self.n_censored as f64 / self.n_trials as f64
    }

    /// `mean_abs_dev / main_term`, when the main term is defined.
    pub fn ratio_to_main_term(&self) -> Option<f64> {
        self.bound_report.main_term.map(|m| self.mean_abs_dev / m)
    }
}

/// Trials `0..n_trials` in index order.
pub fn simulate_trials(
    params: &WalkParams,
    est: &EstimatorConfig,
    n_trials: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<Vec<TrialOutcome>> {
    params.validate()?;
    if !(est.c.is_finite() && est.c >= 0.0) {
        return Err(Error::domain("c", est.c, "must be finite and non-negative"));
    }
    let (p, c) = (*params, est.c);
    par_collect(n_trials, opts, move |i| simulate(&p, c, master_seed, i))
}

pub fn run_experiment(
    params: &WalkParams,
    est: &EstimatorConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<ExperimentSummary> {
    run_experiment_with(params, est, n_trials, master_seed, &RunOptions::default())
}

pub fn run_experiment_with(
    params: &WalkParams,
    est: &EstimatorConfig,
    n_trials: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<ExperimentSummary> {
    if n_trials < MIN_TRIALS {
        return Err(Error::domain(
            "n_trials",
            n_trials as f64,
            "an experiment needs at least 100 trials",
        ));
    }
    let outcomes = simulate_trials(params, est, n_trials, master_seed, opts)?;
    Ok(summarize(params, &outcomes, opts.lower_bound_variant))
}

/// Aggregate `outcomes` (in trial order) and judge them against the bounds.
pub fn summarize(params: &WalkParams, outcomes: &[TrialOutcome], variant: LowerBoundVariant) -> ExperimentSummary {
    let kept: Vec<&TrialOutcome> = outcomes.iter().filter(|o| !o.is_censored()).collect();
    let n_trials = outcomes.len() as u64;
    let n_censored = n_trials - kept.len() as u64;
    let n_kept = kept.len() as f64;

    let abs_dev = MeanEstimate::from_values(kept.iter().map(|o| o.abs_dev()));
    let signed = MeanEstimate::from_values(kept.iter().map(|o| o.eta - o.tau));
    let tau = MeanEstimate::from_values(kept.iter().map(|o| o.tau));
    let mean_of = |f: &dyn Fn(&TrialOutcome) -> f64| kept.iter().map(|o| f(o)).sum::<f64>() / n_kept;

    let bound_report = bound_report(params, variant);
    let ci = abs_dev.ci99();
    let verdict = if n_censored as f64 > CENSORING_BUDGET * n_trials as f64 {
        Verdict::InvalidCensoring
    } else {
        match bound_report.bracket() {
            None => Verdict::NoBracket,
            Some((lo, hi)) => {
                if abs_dev.mean - ci >= lo && abs_dev.mean + ci <= hi {
                    Verdict::InsideBracket
                } else if abs_dev.mean - ci < lo {
                    Verdict::BelowLower
                } else {
                    Verdict::AboveUpper
                }
            }
        }
    };

    ExperimentSummary {
        n_trials,
        n_censored,
        mean_abs_dev: abs_dev.mean,
        ci_halfwidth_abs_dev: ci,
        mean_pos_dev: mean_of(&|o| (o.eta - o.tau).max(0.0)),
        mean_signed_dev: signed.mean,
        signed_dev_stderr: signed.stderr,
        prob_eta_early: mean_of(&|o| if o.eta < o.tau { 1.0 } else { 0.0 }),
        mean_overshoot: mean_of(&|o| o.overshoot_x),
        mean_sq_overshoot: mean_of(&|o| o.overshoot_x * o.overshoot_x),
        mean_tau: tau.mean,
        tau_stderr: tau.stderr,
        mean_eta: mean_of(&|o| o.eta),
        bound_report,
        verdict,
    }
}
