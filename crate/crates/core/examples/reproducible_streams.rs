//! Trials are pure functions of `(seed, index)`: the same trial comes out of
//! a serial call, a one-thread pool and a many-thread pool.
//!
//! `cargo run --example reproducible_streams`

use tstlab::montecarlo::{run_experiment_with, RunOptions};
use tstlab::path::sample_trial;
use tstlab::rng::{NoiseStream, StreamRole};
use tstlab::{EstimatorConfig, WalkParams};

fn main() -> tstlab::Result<()> {
    let params = WalkParams::discrete(1.0, 0.5, 200.0)?;
    let est = EstimatorConfig::optimal(0.5)?;

    let first: Vec<f64> = {
        let mut g = NoiseStream::new(42, 7, StreamRole::V).open();
        (0..3).map(|_| g.next_gaussian()).collect()
    };
    println!("trial 7, V stream starts {first:?}");
    println!("trial 7 alone:  {:?}", sample_trial(&params, &est, 42, 7)?);

    let one = run_experiment_with(&params, &est, 2_000, 42, &RunOptions::default().threads(1))?;
    let four = run_experiment_with(&params, &est, 2_000, 42, &RunOptions::default().threads(4))?;
    println!("1 thread:  E|eta - tau| = {}", one.mean_abs_dev);
    println!("4 threads: E|eta - tau| = {}", four.mean_abs_dev);
    assert_eq!(one, four);
    Ok(())
}
