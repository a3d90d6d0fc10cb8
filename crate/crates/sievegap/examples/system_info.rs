//! Densities of the built-in sieving systems.
//!
//! Prints `sigma(x)`, the empirical support density, and the track
//! `sigma(x) log x` for the primes, the values of `n^2 + 1`, and the twin
//! system. The twin track grows like `log x`, so that system is flagged as not
//! one-dimensional.
//!
//! ```text
//! cargo run --example system_info
//! ```

use sievegap::system::SievingSystem;

fn main() -> sievegap::error::Result<()> {
    let checkpoints = [1_000, 10_000, 100_000];
    for spec in ["eratosthenes", "poly:n^2+1", "twin"] {
        let system = SievingSystem::resolve(spec)?;
        let report = system.mertens_fit(&checkpoints, 0.1)?;
        println!("{spec}");
        println!("  sigma(10^5)      = {:.6e}", report.sigma);
        println!("  rho_hat          = {:.4}", report.rho_hat);
        println!("  bits of P(10^5)  = {}", report.period_bitlength);
        for (x, v) in &report.mertens_track {
            println!("  sigma log x at {x:>6} = {v:.5}");
        }
        println!("  one-dimensional  = {}", report.one_dimensional);
    }
    Ok(())
}
