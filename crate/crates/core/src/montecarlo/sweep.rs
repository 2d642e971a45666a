use serde::{Deserialize, Serialize};

use super::{run_experiment_with, ExperimentSummary, RunOptions};
use crate::model::{Coefficient, TimeMode, WalkParams};
use crate::rng::derive_seed;
use crate::{Error, Result};

fn default_mode() -> TimeMode {
    TimeMode::Discrete
}

fn default_dt() -> f64 {
    0.01
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub l: f64,
    pub s: f64,
    pub eps: f64,
    #[serde(default)]
    pub c: Coefficient,
    #[serde(default = "default_mode")]
    pub mode: TimeMode,
    /// Brownian grid step; ignored in discrete mode.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

impl SweepPoint {
    pub fn discrete(l: f64, s: f64, eps: f64, c: Coefficient) -> Self {
        SweepPoint {
            l,
            s,
            eps,
            c,
            mode: TimeMode::Discrete,
            dt: default_dt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub point: SweepPoint,
    /// Resolved tracking coefficient, when the point was valid.
    pub c: Option<f64>,
    pub seed: u64,
    pub outcome: std::result::Result<ExperimentSummary, String>,
}

impl SweepRow {
    pub fn ratio_to_main_term(&self) -> Option<f64> {
        self.outcome.as_ref().ok()?.ratio_to_main_term()
    }
}

/// One experiment per grid point. Row `i` is seeded from `(master_seed, i)`,
/// so appending points never changes earlier rows. A failing point records
/// its error and the sweep moves on.
pub fn sweep(points: &[SweepPoint], n_trials: u64, master_seed: u64, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    if points.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    Ok(points
        .iter()
        .enumerate()
        .map(|(index, point)| {
            let seed = derive_seed(master_seed, index as u64);
            let resolved = point
                .c
                .resolve(point.eps)
                .and_then(|est| Ok((WalkParams::new(point.s, point.eps, point.l, point.mode, point.dt)?, est)));
            let c = resolved.as_ref().ok().map(|(_, est)| est.c);
            let outcome = resolved
                .and_then(|(params, est)| run_experiment_with(&params, &est, n_trials, seed, opts))
                .map_err(|e| e.to_string());
            SweepRow {
                index,
                point: *point,
                c,
                seed,
                outcome,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_stable_under_appending() {
        let a = SweepPoint::discrete(30.0, 1.0, 1.0, Coefficient::Auto);
        let b = SweepPoint::discrete(60.0, 1.0, 0.5, Coefficient::Value(0.0));
        let bad = SweepPoint::discrete(30.0, -1.0, 1.0, Coefficient::Auto);
        let opts = RunOptions::default();
        let short = sweep(&[a], 200, 5, &opts).unwrap();
        let long = sweep(&[a, bad, b], 200, 5, &opts).unwrap();
        assert_eq!(short[0], long[0]);
        assert!(long[1].outcome.is_err());
        assert!(long[2].outcome.is_ok());
        assert!(long[2].ratio_to_main_term().unwrap() > 0.0);
        assert!(sweep(&[], 200, 5, &opts).is_err());
    }
}
