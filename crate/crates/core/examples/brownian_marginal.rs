//! The simulated Brownian crossing time against its inverse-Gaussian law,
//! with and without the bridge correction.
//!
//! `cargo run --release --example brownian_marginal`

use tstlab::model::gaussian_tail;
use tstlab::montecarlo::{simulate_trials, RunOptions};
use tstlab::stats::ks_distance;
use tstlab::{EstimatorConfig, WalkParams};

/// `P(tau <= t)` for `s t + B_t` crossing `l`.
fn passage_cdf(s: f64, l: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let r = t.sqrt();
    let a = gaussian_tail((l - s * t) / r).unwrap();
    let b = gaussian_tail((l + s * t) / r).unwrap();
    a + (2.0 * s * l).exp() * b
}

fn main() -> tstlab::Result<()> {
    let (s, l, dt) = (1.0, 10.0, 0.01);
    let est = EstimatorConfig::optimal(1.0)?;
    for bridge in [true, false] {
        let params = WalkParams::brownian(s, 1.0, l, dt)?.with_bridge_correction(bridge);
        let out = simulate_trials(&params, &est, 20_000, 5, &RunOptions::default())?;
        let taus: Vec<f64> = out.iter().map(|o| o.tau).collect();
        let mean = taus.iter().sum::<f64>() / taus.len() as f64;
        println!(
            "bridge {bridge:<5}  mean tau {mean:.4} (exact {:.1})  KS {:.5}",
            l / s,
            ks_distance(&taus, |t| passage_cdf(s, l, t))
        );
    }
    Ok(())
}
