//! Sift a window and find its largest gap.
//!
//! With `I_p = {0}` and the zero shift the sifted set `S_x` consists of the
//! integers free of prime factors up to `x`. A random shift moves every
//! residue class independently, which is how long gaps are searched for.
//!
//! ```text
//! cargo run --example sifted_gaps
//! ```

use sievegap::system::SievingSystem;
use sievegap::window::{gap_scan, sift, ShiftVector};

fn main() -> sievegap::error::Result<()> {
    let primes = SievingSystem::eratosthenes();

    // The members of S_5 in [1, 31] are 1, 7, 11, 13, 17, 19, 23, 29, 31.
    let x = 5;
    let w = sift(&primes, x, &ShiftVector::zero(&primes, x), 1, 31, 0)?;
    let members: Vec<i64> = w.members().collect();
    println!("S_5 in [1, 31]: {members:?}");
    println!("largest gap: {:?}", w.largest_gap());

    // A random shift for the primes up to 13, scanned over a longer window.
    let x = 13;
    let shift = ShiftVector::random(&primes, 0, x, 7, "example");
    let scan = gap_scan(&primes, x, &shift, -10_000, 10_000, 0)?;
    println!(
        "S_13 + b in [-10^4, 10^4]: {} members, largest gap {} after {}",
        scan.members_count, scan.gap.length, scan.gap.left
    );
    println!("shift file:\n{}", shift.to_text());
    Ok(())
}
