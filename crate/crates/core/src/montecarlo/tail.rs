//! Driftless first passage: the `t^(-1/2)` survival tail.
//!
//! For `B_t` with no drift, `P(tau_h > t) = 1 - 2 Q(h / sqrt t)`, which decays
//! like `sqrt(2/pi) h t^(-1/2)`. Paths are simulated on a grid that is fine
//! near 0 and geometric afterwards; the bridge draw in every interval makes
//! the crossing interval exact in law, so survival at grid points carries no
//! discretization bias however coarse the late steps are.

use libm::erf;
use serde::{Deserialize, Serialize};

use super::{par_collect, RunOptions, SE_MARGIN};
use crate::model::gaussian_tail;
use crate::path::first_passage_on_grid;
use crate::stats::ols_slope;
use crate::{Error, Result};

const FINE_STEP: f64 = 0.01;
const FINE_UNTIL: f64 = 1.0;
const GROWTH: f64 = 0.02;
const MIN_FIT_POINTS: usize = 5;
const MIN_TAIL_SURVIVORS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMoment {
    pub horizon: f64,
    /// Sample mean of `sqrt(min(tau, horizon))`.
    pub empirical: f64,
    /// The same expectation under the exact reflection law.
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheckResult {
    pub h: f64,
    pub n_trials: u64,
    pub time_grid: Vec<f64>,
    pub empirical_survival: Vec<f64>,
    /// `1 - 2 Q(h / sqrt t)` at each checkpoint.
    pub exact_survival: Vec<f64>,
    /// Binomial standard error of the empirical survival under the exact law.
    pub survival_stderr: Vec<f64>,
    pub within_3se: Vec<bool>,
    /// Least-squares slope of log survival against log time over the last
    /// decade of checkpoints.
    pub slope: f64,
    pub slope_stderr: f64,
    pub fit_points: usize,
    pub survivors_at_end: u64,
    /// Set when fewer than 100 paths survive the last checkpoint; the slope
    /// standard error then includes the Poisson error of the end counts.
    pub widened_stderr: bool,
    pub truncated_sqrt_moments: Vec<TruncatedMoment>,
}

impl TailCheckResult {
    /// Ratios of successive truncated `E sqrt(tau)` values.
    pub fn truncated_growth(&self) -> Vec<f64> {
        self.truncated_sqrt_moments
            .windows(2)
            .map(|w| w[1].empirical / w[0].empirical)
            .collect()
    }
}

/// `per_decade` log-spaced checkpoints from `lo` to `hi`, both included.
pub fn log_checkpoints(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let n = ((b - a) * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| {
            let e = a + (b - a) * i as f64 / n.max(1) as f64;
            // Snap to exact decades so they can serve as truncation horizons.
            if (e - e.round()).abs() < 1e-9 {
                10f64.powi(e.round() as i32)
            } else {
                10f64.powf(e)
            }
        })
        .collect()
}

fn build_grid(checkpoints: &[f64]) -> Vec<f64> {
    let end = *checkpoints.last().expect("non-empty checkpoints");
    let mut grid = Vec::new();
    let mut k = 1;
    loop {
        let t = k as f64 * FINE_STEP;
        if t > FINE_UNTIL.min(end) {
            break;
        }
        grid.push(t);
        k += 1;
    }
    let mut t = grid.last().copied().unwrap_or(FINE_STEP);
    while t < end {
        t = (t * (1.0 + GROWTH)).max(t + FINE_STEP);
        grid.push(t.min(end));
    }
    grid.extend_from_slice(checkpoints);
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

/// Exact `E sqrt(min(tau_h, horizon))` for driftless Brownian motion:
/// the integral of `erf(h / (sqrt(2) u))` over `u` in `[0, sqrt(horizon)]`.
pub fn exact_truncated_sqrt_moment(h: f64, horizon: f64) -> f64 {
    let f = |u: f64| {
        if u <= 0.0 {
            1.0
        } else {
            erf(h / (std::f64::consts::SQRT_2 * u))
        }
    };
    let root = horizon.sqrt();
    // Split at u = h where the integrand turns from ~1 to its 1/u tail.
    let knots = [0.0, h.min(root), root];
    knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| quadrature::integrate(f, w[0], w[1], 1e-12).integral)
        .sum()
}

/// Simulate `n_trials` driftless passages over `h` and compare the survival
/// function at `checkpoints` with the reflection law.
pub fn tail_exponent_estimate(
    h: f64,
    n_trials: u64,
    checkpoints: &[f64],
    master_seed: u64,
    opts: &RunOptions,
) -> Result<TailCheckResult> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain("h", h, "level must be positive"));
    }
    if n_trials == 0 {
        return Err(Error::InsufficientData("no trials requested".into()));
    }
    if checkpoints.is_empty() || checkpoints.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Config("checkpoints must be positive and finite".into()));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("checkpoints must be strictly increasing".into()));
    }

    let grid = build_grid(checkpoints);
    let crossings = {
        let g = &grid;
        par_collect(n_trials, opts, move |i| {
            first_passage_on_grid(0.0, 1.0, h, g, master_seed, i, true)
        })?
    };

    // survivors[j] = paths still below h at grid[j].
    let mut crossed_at = vec![0u64; grid.len()];
    for c in crossings.iter().flatten() {
        crossed_at[*c] += 1;
    }
    let mut survivors = Vec::with_capacity(grid.len());
    let mut alive = n_trials;
    for &c in &crossed_at {
        alive -= c;
        survivors.push(alive);
    }
    let grid_index = |t: f64| grid.iter().position(|&g| g == t).expect("checkpoint on grid");

    let n = n_trials as f64;
    let mut empirical_survival = Vec::with_capacity(checkpoints.len());
    let mut exact_survival = Vec::with_capacity(checkpoints.len());
    let mut survival_stderr = Vec::with_capacity(checkpoints.len());
    let mut within_3se = Vec::with_capacity(checkpoints.len());
    let mut counts = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        let alive = survivors[grid_index(t)];
        let emp = alive as f64 / n;
        let exact = 1.0 - 2.0 * gaussian_tail(h / t.sqrt())?;
        let se = (exact * (1.0 - exact) / n).sqrt();
        empirical_survival.push(emp);
        exact_survival.push(exact);
        survival_stderr.push(se);
        within_3se.push((emp - exact).abs() <= SE_MARGIN * se);
        counts.push(alive);
    }

    let t_last = *checkpoints.last().unwrap();
    let window: Vec<usize> = (0..checkpoints.len())
        .filter(|&j| checkpoints[j] >= t_last / 10.0 * (1.0 - 1e-12))
        .collect();
    if window.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "last decade holds {} checkpoints, need at least {MIN_FIT_POINTS}",
            window.len()
        )));
    }
    if window.iter().any(|&j| counts[j] == 0) {
        return Err(Error::InsufficientData(
            "no surviving paths inside the fitting window".into(),
        ));
    }
    let xs: Vec<f64> = window.iter().map(|&j| checkpoints[j].ln()).collect();
    let ys: Vec<f64> = window.iter().map(|&j| empirical_survival[j].ln()).collect();
    let (slope, mut slope_stderr) = ols_slope(&xs, &ys).expect("at least five distinct points");
    let survivors_at_end = *counts.last().unwrap();
    let widened_stderr = survivors_at_end < MIN_TAIL_SURVIVORS;
    if widened_stderr {
        let (first, last) = (window[0], *window.last().unwrap());
        let poisson = (1.0 / counts[first] as f64 + 1.0 / counts[last] as f64).sqrt() / (xs[xs.len() - 1] - xs[0]);
        slope_stderr = slope_stderr.max(poisson);
    }

    let crossing_times: Vec<f64> = crossings.iter().map(|c| c.map_or(f64::INFINITY, |i| grid[i])).collect();
    let truncated_sqrt_moments = checkpoints
        .iter()
        .filter(|t| (t.log10() - t.log10().round()).abs() < 1e-12)
        .map(|&horizon| TruncatedMoment {
            horizon,
            empirical: crossing_times.iter().map(|&tau| tau.min(horizon).sqrt()).sum::<f64>() / n,
            exact: exact_truncated_sqrt_moment(h, horizon),
        })
        .collect();

    Ok(TailCheckResult {
        h,
        n_trials,
        time_grid: checkpoints.to_vec(),
        empirical_survival,
        exact_survival,
        survival_stderr,
        within_3se,
        slope,
        slope_stderr,
        fit_points: window.len(),
        survivors_at_end,
        widened_stderr,
        truncated_sqrt_moments,
    })
}
