//! The `t^(-1/2)` survival tail of a driftless crossing time.
//!
//! `cargo run --release --example driftless_tail -- [trials]`

use tstlab::montecarlo::{log_checkpoints, tail_exponent_estimate, RunOptions};

fn main() -> tstlab::Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .map_or(100_000, |a| a.parse().expect("trial count"));
    let cps = log_checkpoints(1.0, 1e6, 10);
    let r = tail_exponent_estimate(1.0, trials, &cps, 99, &RunOptions::default())?;
    for (i, t) in r.time_grid.iter().enumerate().step_by(10) {
        println!(
            "t = {t:>9.0}  P(tau > t) = {:.5}  exact {:.5}",
            r.empirical_survival[i], r.exact_survival[i]
        );
    }
    println!(
        "slope {:.4} +/- {:.4} over {} points ({} survivors at the end)",
        r.slope, r.slope_stderr, r.fit_points, r.survivors_at_end
    );
    // The mean of sqrt(tau) is infinite: truncated versions grow without bound,
    // but only logarithmically in the horizon.
    for m in &r.truncated_sqrt_moments {
        println!(
            "E sqrt(min(tau, {:>7})) = {:.4}  exact {:.4}",
            m.horizon, m.empirical, m.exact
        );
    }
    Ok(())
}
