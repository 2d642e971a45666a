//! Overshoot moments, the Wald bracket and the crossing-spread bounds for a
//! single noisy walk.
//!
//! `cargo run --release --example overshoot_check`

use tstlab::montecarlo::{summarize_overshoot, RunOptions};
use tstlab::path::PathSpec;

fn main() -> tstlab::Result<()> {
    let spec = PathSpec::new(1.0, 1.0, 100.0)?;
    let sum = summarize_overshoot(&spec, 100_000, 3, None, &RunOptions::default())?;
    let show = |name: &str, m: tstlab::stats::MeanEstimate, bound: String| {
        println!("{name:<16} {:>9.4} +/- {:.4}   bound {bound}", m.mean, m.stderr);
    };
    show("E R", sum.overshoot, format!("{:.4}", sum.mean_bound));
    show("E R^2", sum.sq_overshoot, format!("{:.4}", sum.sq_bound));
    let (lo, hi) = sum.wald.unwrap();
    show("s E tau", sum.scaled_time, format!("[{lo:.1}, {hi:.1}]"));
    let b = sum.spread_bounds.unwrap();
    show("E|s tau - l|", sum.spread.abs_dev, format!("{:.4}", b.abs_dev));
    show("E(s tau - l)+", sum.spread.pos_dev, format!("{:.4}", b.pos_dev));
    show(
        "E(X - s tau)+",
        sum.spread.endpoint_excess,
        format!("{:.4}", b.endpoint_excess),
    );
    println!("verdicts: {:?}", sum.verdicts);
    Ok(())
}
