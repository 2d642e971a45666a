//! One tracking experiment at the optimal coefficient, compared with the
//! bracket and with the blind and raw-observation rules.
//!
//! `cargo run --release --example track_threshold -- [l] [trials]`

use tstlab::bounds::{estimate_c0, estimate_c1};
use tstlab::montecarlo::run_experiment;
use tstlab::{EstimatorConfig, WalkParams};

fn main() -> tstlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let l: f64 = args.next().map_or(1e3, |a| a.parse().expect("level"));
    let trials: u64 = args.next().map_or(10_000, |a| a.parse().expect("trial count"));
    let (s, eps, seed) = (1.0, 1.0, 20_240_601);

    let params = WalkParams::discrete(s, eps, l)?;
    for (name, est) in [
        ("c = c_bar", EstimatorConfig::optimal(eps)?),
        ("c = 0", EstimatorConfig::new(0.0, eps)?),
        ("c = 1", EstimatorConfig::new(1.0, eps)?),
    ] {
        let sum = run_experiment(&params, &est, trials, seed)?;
        let (lo, hi) = sum.abs_dev_interval();
        println!(
            "{name:<10} E|eta - tau| = {:8.3}  99% CI [{lo:.3}, {hi:.3}]  P(eta < tau) = {:.3}  verdict {:?}",
            sum.mean_abs_dev, sum.prob_eta_early, sum.verdict
        );
        if est.is_optimal() {
            let r = &sum.bound_report;
            println!(
                "           bracket [{:.3}, {:.3}], main term {:.3}",
                r.lower.unwrap(),
                r.upper.unwrap(),
                r.main_term.unwrap()
            );
        }
    }
    println!(
        "reference: c = 0 bound {:.3}, c = 1 bound {:.3}",
        estimate_c0(s, l)?,
        estimate_c1(s, eps, l)?
    );
    Ok(())
}
