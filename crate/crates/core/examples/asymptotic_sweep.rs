//! Ratio of the empirical tracking error to the main term as the level grows.
//!
//! `cargo run --release --example asymptotic_sweep`

use tstlab::model::Coefficient;
use tstlab::montecarlo::{sweep, RunOptions, SweepPoint};

fn main() -> tstlab::Result<()> {
    let points: Vec<SweepPoint> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&l| SweepPoint::discrete(l, 1.0, 1.0, Coefficient::Auto))
        .collect();
    let rows = sweep(&points, 4_000, 11, &RunOptions::default())?;
    println!("{:>8} {:>10} {:>10} {:>8}", "l", "E|eta-tau|", "main", "ratio");
    for row in &rows {
        let sum = row.outcome.as_ref().expect("valid grid point");
        println!(
            "{:>8} {:>10.3} {:>10.3} {:>8.3}",
            row.point.l,
            sum.mean_abs_dev,
            sum.bound_report.main_term.unwrap(),
            row.ratio_to_main_term().unwrap()
        );
    }
    Ok(())
}
