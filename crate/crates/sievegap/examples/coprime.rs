//! Blocks of consecutive values with no value coprime to the rest.
//!
//! For `f(n) = n` the search finds the smallest `n` where each of
//! `n + 1, ..., n + k` shares a factor with another. For `n^2 + 1` a witness
//! for `k = 2x` is assembled from a long gap and the Chinese remainder
//! theorem.
//!
//! ```text
//! cargo run --release --example coprime
//! ```

use num_bigint::BigInt;
use sievegap::applications::{coprimality_witness, gap_coprimality_witness, verify_coprimality_witness};
use sievegap::poly::Poly;

fn main() -> sievegap::error::Result<()> {
    let id: Poly = "n".parse()?;
    for k in [2, 10, 16, 17, 18] {
        match coprimality_witness(&id, k, 10_000)?.witness {
            Some(n) => println!("f = n, k = {k}: smallest witness {n}"),
            None => println!("f = n, k = {k}: no witness up to 10^4"),
        }
    }
    let f: Poly = "n^2+1".parse()?;
    for x in [15, 30, 50] {
        let w = gap_coprimality_witness(&f, x, 1)?;
        let n: BigInt = w.n.parse().expect("decimal");
        let ok = verify_coprimality_witness(&f, &n, w.k).is_ok();
        println!(
            "f = n^2+1, k = {}: n = {} (gap {}, {} pairing primes, verified {ok})",
            w.k, w.n, w.gap, w.pairing_primes_used
        );
    }
    Ok(())
}
