//! Long runs of composite values of a polynomial.
//!
//! The brute-force scan tests every `f(n)` for `n <= X`. The constructed run
//! comes from a long gap in the sifted set of `f`: each `n` in it has
//! `f(n)` divisible by a small prime, and every value is checked.
//!
//! ```text
//! cargo run --release --example composite_runs
//! ```

use sievegap::applications::{composite_run_bruteforce, composite_run_constructed};
use sievegap::poly::Poly;

fn main() -> sievegap::error::Result<()> {
    let f: Poly = "n^2+1".parse()?;
    for x_max in [10_000, 1_000_000] {
        let run = composite_run_bruteforce(&f, x_max)?;
        println!("X = {x_max}: longest run of composite f(n) starts at {} and has length {}", run.start, run.length);
    }
    for seed in 0..5 {
        let c = composite_run_constructed(&f, 1_000_000, seed)?;
        println!(
            "seed {seed}: x = {}, run [{}, {}] of length {} (baseline {}), verified {}",
            c.x,
            c.start,
            c.start + c.length - 1,
            c.length,
            c.baseline_length,
            c.verified
        );
    }
    Ok(())
}
