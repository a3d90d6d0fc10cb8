//! Build a long run of integers outside a shifted sifted set.
//!
//! Stage 1 picks uniform residues for small primes, stage 2 picks one class
//! per medium prime with probability proportional to its weight, and stage 3
//! removes the survivors one prime at a time. The trivial baseline skips
//! stage 2. Both runs are certified by sieving the interval again.
//!
//! ```text
//! cargo run --release --example construct_gap
//! ```

use sievegap::construction::{construct, derive_params, trivial_baseline, ParamRequest, Stage2Mode};
use sievegap::system::SievingSystem;
use sievegap::window::verify_empty;

fn main() -> sievegap::error::Result<()> {
    let system = SievingSystem::eratosthenes();
    let x = 200;
    let params = derive_params(&system, &ParamRequest::desk(&system, x))?;
    println!(
        "x = {x}, y = {}, z = {}, scales = {:?}",
        params.y,
        params.z,
        params.scales.iter().map(|s| (s.h, s.primes.len())).collect::<Vec<_>>()
    );
    let mut wins = 0;
    for seed in 0..10 {
        let c = construct(&system, &params, Stage2Mode::Sample, seed)?;
        let b = trivial_baseline(&system, x, seed)?;
        assert!(verify_empty(&system, x, &c.shift, 1, c.length as i64)?);
        if c.length >= b.length {
            wins += 1;
        }
        println!(
            "seed {seed}: L = {:>3}, baseline {:>3}, survivors {:?}",
            c.length, b.length, c.survivors_by_stage
        );
    }
    println!("construction at least as long as the baseline on {wins}/10 seeds");
    let cover = construct(&system, &params, Stage2Mode::Cover { eta: 0.05 }, 0)?;
    println!("cover mode, seed 0: L = {}, cover {:?}", cover.length, cover.cover);
    Ok(())
}
