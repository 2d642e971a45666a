//! Closed-form bounds across levels, in both time modes.
//!
//! `cargo run --example bounds_table`

use tstlab::bounds::{best_n, main_term, upper_bound_brownian, upper_bound_discrete, LowerBoundVariant};
use tstlab::{TimeMode, WalkParams};

fn main() -> tstlab::Result<()> {
    let (s, eps) = (1.0, 1.0);
    println!(
        "{:>8} {:>10} {:>12} {:>8} {:>12} {:>12} {:>12}",
        "l", "main", "lower", "n*", "upper", "bm lower", "bm upper"
    );
    for l in [1e2, 1e3, 1e4, 1e5, 1e6] {
        let p = WalkParams::discrete(s, eps, l)?;
        let (n, lo) = best_n(&p, TimeMode::Discrete, LowerBoundVariant::Printed)?;
        let (_, blo) = best_n(&p, TimeMode::Brownian, LowerBoundVariant::Printed)?;
        println!(
            "{l:>8} {:>10.4} {lo:>12.4} {n:>8} {:>12.4} {blo:>12.4} {:>12.4}",
            main_term(&p),
            upper_bound_discrete(&p)?,
            upper_bound_brownian(&p)?,
        );
    }

    // The lower bound as printed uses a (1 + eps) scale; the variance of a
    // noisy step suggests (1 + eps^2). They coincide at eps = 1.
    println!("\nlower bound variants at l = 1e4, s = 1");
    for eps in [0.25, 1.0, 4.0] {
        let p = WalkParams::discrete(s, eps, 1e4)?;
        let (_, printed) = best_n(&p, TimeMode::Discrete, LowerBoundVariant::Printed)?;
        let (_, variance) = best_n(&p, TimeMode::Discrete, LowerBoundVariant::Variance)?;
        println!("  eps = {eps:<5} printed {printed:>10.4}  variance {variance:>10.4}");
    }
    Ok(())
}
