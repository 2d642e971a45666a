//! Tracking the threshold crossing time of a Gaussian random walk.
//!
//! A hidden walk `X_t = s t + sum V_i` is observed only through
//! `Y_t = X_t + eps sum W_i`. The crossing time `tau_l = inf{t >= 0 : X_t >= l}`
//! is tracked by a stopping time on `Y`, here the crossing time of the linear
//! estimate `Xhat_t = s t + c (Y_t - s t)`. This crate provides:
//!
//! - [`model`]: problem parameters, the Gaussian tail `Q`, and the tracking
//!   coefficient algebra.
//! - [`path`]: seeded paired-path simulation in discrete and Brownian-grid
//!   time, generic first-passage detection and the Brownian bridge correction.
//! - [`bounds`]: the closed-form upper and lower bounds on `inf E|eta - tau_l|`,
//!   the asymptotic main term, and the overshoot/Wald/crossing-time bounds they
//!   are built from.
//! - [`montecarlo`]: parallel, reproducible experiments that check the bounds
//!   empirically, including the driftless tail-law check.
//! - [`cli`]: the command implementations behind the `tstlab` binary.
//!
//! Every stochastic routine is a pure function of a master seed and a trial
//! index, so results do not depend on the number of worker threads.

pub mod bounds;
pub mod cli;
mod error;
pub mod model;
pub mod montecarlo;
pub mod path;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use model::{EstimatorConfig, TimeMode, WalkParams};
