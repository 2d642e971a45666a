//! Seeded paired-path simulation and first-passage detection.
//!
//! Both clocks of a trial run on one noise realization: `X_t = s t + sum V_i`
//! and `Xhat_t = s t + c (sum V_i + eps sum W_i)`. In Brownian mode the sums
//! are scaled by `sqrt(dt)` and each clock may additionally detect a crossing
//! between grid points through a Brownian bridge draw. The two bridge draws of
//! one step are independent, which ignores the correlation of `X` and `Xhat`
//! inside the step; keep `dt` small enough for bridge hits to be rare.

use serde::{Deserialize, Serialize};

use crate::model::{EstimatorConfig, TimeMode, WalkParams};
use crate::rng::{GaussianStream, NoiseStream, StreamRole};
use crate::{Error, Result};

/// Bridge draws are skipped once the crossing probability falls below the
/// smallest uniform the streams can produce (2^-54).
const BRIDGE_EXPONENT_CUTOFF: f64 = 40.0;

/// One paired simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// Crossing time of `X` (time units; the horizon when censored).
    pub tau: f64,
    /// Crossing time of `Xhat` (time units; the horizon when censored).
    pub eta: f64,
    /// `X_tau - l`; always 0 in Brownian mode.
    pub overshoot_x: f64,
    /// `Xhat_eta - l`; always 0 in Brownian mode.
    pub overshoot_xhat: f64,
    pub censored_tau: bool,
    pub censored_eta: bool,
}

impl TrialOutcome {
    pub fn is_censored(&self) -> bool {
        self.censored_tau || self.censored_eta
    }

    pub fn abs_dev(&self) -> f64 {
        (self.eta - self.tau).abs()
    }
}

/// A generic walk `S_t = Z_1 + ... + Z_t` with `Z_i ~ N(step_mean, step_std^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub step_mean: f64,
    pub step_std: f64,
    pub level: f64,
}

impl PathSpec {
    pub fn new(step_mean: f64, step_std: f64, level: f64) -> Result<Self> {
        if !step_mean.is_finite() {
            return Err(Error::domain("step_mean", step_mean, "must be finite"));
        }
        if !(step_std.is_finite() && step_std >= 0.0) {
            return Err(Error::domain("step_std", step_std, "must be finite and non-negative"));
        }
        if !(level.is_finite() && level >= 0.0) {
            return Err(Error::domain("level", level, "must be finite and non-negative"));
        }
        Ok(PathSpec {
            step_mean,
            step_std,
            level,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    /// Number of steps to the first `S_t >= level` (the horizon when censored).
    pub time: u64,
    /// `S_time - level`; 0 when censored.
    pub overshoot: f64,
    pub censored: bool,
}

/// First passage of a generic walk over `spec.level`, with the `t >= 0`
/// convention (level 0 is crossed at time 0). Reads the `V` stream of `noise`.
pub fn first_passage(spec: &PathSpec, noise: &NoiseStream, horizon: u64) -> Passage {
    if spec.level <= 0.0 {
        return Passage {
            time: 0,
            overshoot: 0.0,
            censored: false,
        };
    }
    let mut g = noise.open();
    let mut sum = 0.0;
    for t in 1..=horizon {
        sum += g.next_gaussian();
        let s_t = spec.step_mean * t as f64 + spec.step_std * sum;
        if s_t >= spec.level {
            return Passage {
                time: t,
                overshoot: s_t - spec.level,
                censored: false,
            };
        }
    }
    Passage {
        time: horizon,
        overshoot: 0.0,
        censored: true,
    }
}

/// Probability that a Brownian bridge from `a` to `b` over a step of length
/// `dt` with diffusion `sigma2` touches `level`. Returns 1 when an endpoint is
/// already at or above the level and 0 for a zero-variance step.
pub fn brownian_bridge_crossing_prob(a: f64, b: f64, level: f64, dt: f64, sigma2: f64) -> f64 {
    if a >= level || b >= level {
        return 1.0;
    }
    let scale = sigma2 * dt;
    if scale <= 0.0 {
        return 0.0;
    }
    (-2.0 * (level - a) * (level - b) / scale).exp()
}

#[inline]
fn bridge_hit(a: f64, b: f64, level: f64, var_step: f64, bridge: &mut GaussianStream) -> bool {
    if var_step <= 0.0 {
        return false;
    }
    let exponent = 2.0 * (level - a) * (level - b) / var_step;
    if exponent > BRIDGE_EXPONENT_CUTOFF {
        return false;
    }
    bridge.next_uniform() < (-exponent).exp()
}

/// Simulate trial `trial_index` of an experiment seeded with `master_seed`.
pub fn sample_trial(
    params: &WalkParams,
    est: &EstimatorConfig,
    master_seed: u64,
    trial_index: u64,
) -> Result<TrialOutcome> {
    params.validate()?;
    if !(est.c.is_finite() && est.c >= 0.0) {
        return Err(Error::domain("c", est.c, "must be finite and non-negative"));
    }
    Ok(simulate(params, est.c, master_seed, trial_index))
}

/// Unchecked body of [`sample_trial`]; callers validate once per experiment.
pub(crate) fn simulate(params: &WalkParams, c: f64, master_seed: u64, trial_index: u64) -> TrialOutcome {
    if params.l <= 0.0 {
        return TrialOutcome {
            tau: 0.0,
            eta: 0.0,
            overshoot_x: 0.0,
            overshoot_xhat: 0.0,
            censored_tau: false,
            censored_eta: false,
        };
    }
    match params.mode {
        TimeMode::Discrete => simulate_discrete(params, c, master_seed, trial_index),
        TimeMode::Brownian => simulate_brownian(params, c, master_seed, trial_index),
    }
}

fn simulate_discrete(params: &WalkParams, c: f64, seed: u64, idx: u64) -> TrialOutcome {
    let (s, eps, l) = (params.s, params.eps, params.l);
    let mut v = NoiseStream::new(seed, idx, StreamRole::V).open();
    let mut w = NoiseStream::new(seed, idx, StreamRole::W).open();
    let (mut sum_v, mut sum_w) = (0.0, 0.0);
    let mut tau: Option<(u64, f64)> = None;
    let mut eta: Option<(u64, f64)> = None;

    for t in 1..=params.t_max {
        sum_v += v.next_gaussian();
        let ramp = s * t as f64;
        if eta.is_none() {
            sum_w += w.next_gaussian();
            let xhat = ramp + c * (sum_v + eps * sum_w);
            if xhat >= l {
                eta = Some((t, xhat - l));
            }
        }
        if tau.is_none() {
            let x = ramp + sum_v;
            if x >= l {
                tau = Some((t, x - l));
            }
        }
        if tau.is_some() && eta.is_some() {
            break;
        }
    }
    finish(tau, eta, 1.0, params.t_max)
}

fn simulate_brownian(params: &WalkParams, c: f64, seed: u64, idx: u64) -> TrialOutcome {
    let (s, eps, l, dt) = (params.s, params.eps, params.l, params.dt);
    let sqdt = dt.sqrt();
    let var_x = dt;
    let var_xhat = c * c * (1.0 + eps * eps) * dt;
    let bridge_on = params.bridge_correction;

    let mut v = NoiseStream::new(seed, idx, StreamRole::V).open();
    let mut w = NoiseStream::new(seed, idx, StreamRole::W).open();
    let mut bridge = NoiseStream::new(seed, idx, StreamRole::Bridge).open();
    let (mut sum_v, mut sum_w) = (0.0, 0.0);
    let (mut prev_x, mut prev_xhat) = (0.0, 0.0);
    let mut tau: Option<(u64, f64)> = None;
    let mut eta: Option<(u64, f64)> = None;

    for k in 1..=params.t_max {
        sum_v += v.next_gaussian();
        let ramp = s * (k as f64 * dt);
        if tau.is_none() {
            let x = ramp + sqdt * sum_v;
            if x >= l || (bridge_on && bridge_hit(prev_x, x, l, var_x, &mut bridge)) {
                tau = Some((k, 0.0));
            }
            prev_x = x;
        }
        if eta.is_none() {
            sum_w += w.next_gaussian();
            let xhat = ramp + c * sqdt * (sum_v + eps * sum_w);
            if xhat >= l || (bridge_on && bridge_hit(prev_xhat, xhat, l, var_xhat, &mut bridge)) {
                eta = Some((k, 0.0));
            }
            prev_xhat = xhat;
        }
        if tau.is_some() && eta.is_some() {
            break;
        }
    }
    finish(tau, eta, dt, params.t_max)
}

fn finish(tau: Option<(u64, f64)>, eta: Option<(u64, f64)>, step: f64, t_max: u64) -> TrialOutcome {
    let horizon = t_max as f64 * step;
    let (tau, overshoot_x, censored_tau) = match tau {
        Some((k, r)) => (k as f64 * step, r, false),
        None => (horizon, 0.0, true),
    };
    let (eta, overshoot_xhat, censored_eta) = match eta {
        Some((k, r)) => (k as f64 * step, r, false),
        None => (horizon, 0.0, true),
    };
    TrialOutcome {
        tau,
        eta,
        overshoot_x,
        overshoot_xhat,
        censored_tau,
        censored_eta,
    }
}

/// First passage of `drift * t + sigma * B_t` over `level` observed on an
/// arbitrary increasing time grid starting after 0.
///
/// Increments are exact Gaussians and, with `bridge` set, each interval gets a
/// bridge crossing draw, which makes the returned interval index exact in law
/// for any grid. Returns the index into `grid` of the first point at or after
/// the crossing, or `None` if the path survives the whole grid.
pub fn first_passage_on_grid(
    drift: f64,
    sigma: f64,
    level: f64,
    grid: &[f64],
    master_seed: u64,
    trial_index: u64,
    bridge: bool,
) -> Option<usize> {
    if level <= 0.0 {
        return Some(0);
    }
    let mut z = NoiseStream::new(master_seed, trial_index, StreamRole::V).open();
    let mut u = NoiseStream::new(master_seed, trial_index, StreamRole::Bridge).open();
    let (mut t_prev, mut x_prev) = (0.0, 0.0);
    for (i, &t) in grid.iter().enumerate() {
        let h = t - t_prev;
        let x = x_prev + drift * h + sigma * h.sqrt() * z.next_gaussian();
        if x >= level || (bridge && bridge_hit(x_prev, x, level, sigma * sigma * h, &mut u)) {
            return Some(i);
        }
        t_prev = t;
        x_prev = x;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, eps: f64, l: f64) -> WalkParams {
        WalkParams::discrete(s, eps, l).unwrap()
    }

    #[test]
    fn zero_level_is_crossed_at_time_zero() {
        let p = params(1.0, 1.0, 0.0);
        let est = EstimatorConfig::optimal(1.0).unwrap();
        let o = sample_trial(&p, &est, 1, 0).unwrap();
        assert_eq!((o.tau, o.eta, o.overshoot_x, o.overshoot_xhat), (0.0, 0.0, 0.0, 0.0));
        let spec = PathSpec::new(1.0, 1.0, 0.0).unwrap();
        let pass = first_passage(&spec, &NoiseStream::new(1, 0, StreamRole::V), 10);
        assert_eq!((pass.time, pass.overshoot, pass.censored), (0, 0.0, false));
    }

    #[test]
    fn noiseless_observation_tracks_exactly() {
        let p = params(0.7, 0.0, 25.0);
        let est = EstimatorConfig::new(1.0, 0.0).unwrap();
        for seed in 0..200 {
            let o = sample_trial(&p, &est, seed, seed * 3).unwrap();
            assert_eq!(o.eta, o.tau);
            assert_eq!(o.overshoot_xhat, o.overshoot_x);
        }
    }

    #[test]
    fn zero_coefficient_follows_the_ramp() {
        let p = params(1.0, 1.0, 10.5);
        let est = EstimatorConfig::new(0.0, 1.0).unwrap();
        for seed in 0..100 {
            let o = sample_trial(&p, &est, seed, 0).unwrap();
            assert_eq!(o.eta, 11.0);
            assert!((o.overshoot_xhat - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn crossing_is_minimal() {
        // Re-walk the V stream: the step before tau must be strictly below l.
        let p = params(0.5, 1.0, 20.0);
        let est = EstimatorConfig::optimal(1.0).unwrap();
        for idx in 0..50 {
            let o = sample_trial(&p, &est, 9, idx).unwrap();
            let mut g = NoiseStream::new(9, idx, StreamRole::V).open();
            let mut sum = 0.0;
            let steps = o.tau as u64;
            let mut before = 0.0;
            for t in 1..=steps {
                sum += g.next_gaussian();
                let x = 0.5 * t as f64 + sum;
                if t < steps {
                    assert!(x < 20.0);
                    before = x;
                } else {
                    assert!((x - 20.0 - o.overshoot_x).abs() < 1e-12);
                }
            }
            assert!(before < 20.0);
            assert!(o.overshoot_x >= 0.0 && o.overshoot_xhat >= 0.0);
        }
    }

    #[test]
    fn censoring_sets_flags_and_horizon() {
        let p = params(0.0, 1.0, 1e6).with_t_max(50).unwrap();
        let est = EstimatorConfig::optimal(1.0).unwrap();
        let o = sample_trial(&p, &est, 3, 0).unwrap();
        assert!(o.censored_tau && o.censored_eta);
        assert_eq!((o.tau, o.eta), (50.0, 50.0));
    }

    #[test]
    fn deterministic_ramp_passage() {
        let spec = PathSpec::new(1.0, 0.0, 3.0).unwrap();
        let pass = first_passage(&spec, &NoiseStream::new(5, 1, StreamRole::V), 100);
        assert_eq!((pass.time, pass.overshoot), (3, 0.0));
    }

    #[test]
    fn passage_time_monotone_in_level() {
        let noise = NoiseStream::new(77, 12, StreamRole::V);
        let mut last = 0;
        for i in 0..60 {
            let spec = PathSpec::new(0.3, 1.0, i as f64 * 0.5).unwrap();
            let pass = first_passage(&spec, &noise, 100_000);
            assert!(pass.time >= last);
            last = pass.time;
        }
    }

    #[test]
    fn bridge_probability() {
        assert_eq!(brownian_bridge_crossing_prob(2.0, 1.0, 2.0, 0.1, 1.0), 1.0);
        assert_eq!(brownian_bridge_crossing_prob(2.5, 1.0, 2.0, 0.1, 1.0), 1.0);
        assert!(brownian_bridge_crossing_prob(-1e3, -1e3, 0.0, 1.0, 1.0) == 0.0);
        let p = brownian_bridge_crossing_prob(0.0, 0.0, 1.0, 1.0, 2.0);
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);
        assert!((p - 0.3679).abs() < 1e-4);
        assert_eq!(brownian_bridge_crossing_prob(0.0, 0.5, 1.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn brownian_zero_coefficient_grid_crossing() {
        let p = WalkParams::brownian(1.0, 1.0, 2.5, 0.1).unwrap();
        let est = EstimatorConfig::new(0.0, 1.0).unwrap();
        let o = sample_trial(&p, &est, 4, 4).unwrap();
        // First grid point with k * 0.1 >= 2.5.
        let k = (1..).find(|&k| 1.0 * (k as f64 * 0.1) >= 2.5).unwrap();
        assert_eq!(o.eta, k as f64 * 0.1);
        assert_eq!(o.overshoot_x, 0.0);
    }

    #[test]
    fn grid_passage_level_zero_and_survival() {
        let grid: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        assert_eq!(first_passage_on_grid(0.0, 1.0, 0.0, &grid, 1, 1, true), Some(0));
        assert_eq!(first_passage_on_grid(0.0, 0.0, 1.0, &grid, 1, 1, true), None);
        assert_eq!(first_passage_on_grid(1.0, 0.0, 3.0, &grid, 1, 1, true), Some(2));
    }
}
