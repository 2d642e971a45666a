use serde::{Deserialize, Serialize};

use super::{par_collect, RunOptions, SE_MARGIN};
use crate::bounds::{crossing_spread_bounds, overshoot_mean_bound, overshoot_moment_bound, wald_bracket, CrossingSpreadBounds};
use crate::model::{default_t_max, DRIFTLESS_DEFAULT_T_MAX};
use crate::path::{first_passage, PathSpec};
use crate::rng::{NoiseStream, StreamRole};
use crate::stats::MeanEstimate;
use crate::{Error, Result};

/// Empirical spread of `s mu` around the level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpread {
    /// `E|s mu - l|`
    pub abs_dev: MeanEstimate,
    /// `E(s mu - l)_+`
    pub pos_dev: MeanEstimate,
    /// `E(S_mu - s mu)_+`
    pub endpoint_excess: MeanEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvershootVerdicts {
    pub mean_ok: bool,
    pub sq_ok: bool,
    /// `s E mu` inside the Wald bracket (needs positive drift).
    pub wald_ok: Option<bool>,
    /// The three crossing-spread bounds (unit-variance steps only).
    pub spread_ok: Option<[bool; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootSummary {
    pub spec: PathSpec,
    pub n_trials: u64,
    pub n_censored: u64,
    pub overshoot: MeanEstimate,
    pub sq_overshoot: MeanEstimate,
    /// `s mu` (the passage time scaled by the drift).
    pub scaled_time: MeanEstimate,
    pub spread: CrossingSpread,
    pub mean_bound: f64,
    pub sq_bound: f64,
    pub wald: Option<(f64, f64)>,
    pub spread_bounds: Option<CrossingSpreadBounds>,
    pub verdicts: OvershootVerdicts,
}

/// Overshoot statistics of the walk in `spec` over trials `0..n_trials`,
/// checked against the level-uniform overshoot bounds with a 3-SE margin.
pub fn summarize_overshoot(
    spec: &PathSpec,
    n_trials: u64,
    master_seed: u64,
    horizon: Option<u64>,
    opts: &RunOptions,
) -> Result<OvershootSummary> {
    if n_trials < 2 {
        return Err(Error::InsufficientData("need at least two trials".into()));
    }
    let mean_bound = overshoot_mean_bound(spec.step_mean, spec.step_std)?;
    let sq_bound = overshoot_moment_bound(spec.step_mean, spec.step_std, 2.0)?;
    let horizon = horizon.unwrap_or_else(|| {
        if spec.step_mean > 0.0 {
            default_t_max(spec.step_mean, spec.level, 1.0)
        } else {
            DRIFTLESS_DEFAULT_T_MAX
        }
    });
    let spec_copy = *spec;
    let passages = par_collect(n_trials, opts, move |i| {
        first_passage(&spec_copy, &NoiseStream::new(master_seed, i, StreamRole::V), horizon)
    })?;
    let kept: Vec<_> = passages.iter().filter(|p| !p.censored).collect();
    let n_censored = n_trials - kept.len() as u64;

    let (s, l) = (spec.step_mean, spec.level);
    let overshoot = MeanEstimate::from_values(kept.iter().map(|p| p.overshoot));
    let sq_overshoot = MeanEstimate::from_values(kept.iter().map(|p| p.overshoot * p.overshoot));
    let scaled_time = MeanEstimate::from_values(kept.iter().map(|p| s * p.time as f64));
    let spread = CrossingSpread {
        abs_dev: MeanEstimate::from_values(kept.iter().map(|p| (s * p.time as f64 - l).abs())),
        pos_dev: MeanEstimate::from_values(kept.iter().map(|p| (s * p.time as f64 - l).max(0.0))),
        endpoint_excess: MeanEstimate::from_values(kept.iter().map(|p| (l + p.overshoot - s * p.time as f64).max(0.0))),
    };

    let wald = if s > 0.0 {
        Some(wald_bracket(s, spec.step_std, l)?)
    } else {
        None
    };
    let spread_bounds = if s > 0.0 && l > 0.0 && spec.step_std == 1.0 {
        Some(crossing_spread_bounds(s, l)?)
    } else {
        None
    };
    let k = SE_MARGIN;
    let verdicts = OvershootVerdicts {
        mean_ok: overshoot.consistent_with_upper(mean_bound, k),
        sq_ok: sq_overshoot.consistent_with_upper(sq_bound, k),
        // The bracket is on E mu; scale it by s to compare with s mu.
        wald_ok: wald.map(|(lo, hi)| {
            scaled_time.consistent_with_lower(s * lo, k) && scaled_time.consistent_with_upper(s * hi, k)
        }),
        spread_ok: spread_bounds.map(|b| {
            [
                spread.abs_dev.consistent_with_upper(b.abs_dev, k),
                spread.pos_dev.consistent_with_upper(b.pos_dev, k),
                spread.endpoint_excess.consistent_with_upper(b.endpoint_excess, k),
            ]
        }),
    };

    Ok(OvershootSummary {
        spec: *spec,
        n_trials,
        n_censored,
        overshoot,
        sq_overshoot,
        scaled_time,
        spread,
        mean_bound,
        sq_bound,
        wald,
        spread_bounds,
        verdicts,
    })
}
