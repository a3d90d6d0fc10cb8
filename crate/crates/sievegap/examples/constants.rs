//! The gap exponent constant and derangement densities.
//!
//! `C(rho)` is the largest `delta` in `(0, 1/2)` with
//! `(4 + delta) 10^{2 delta} / log(1 / (2 delta)) < rho`. A polynomial of
//! degree `d` with full Galois group has `rho` equal to the share of
//! permutations in `S_d` with a fixed point.
//!
//! ```text
//! cargo run --example constants
//! ```

use sievegap::applications::{constants, rho_derangement};
use sievegap::moments::rational_to_f64;

fn main() -> sievegap::error::Result<()> {
    for i in 1..=10 {
        let rho = i as f64 / 10.0;
        let r = constants(rho, 1e-12)?;
        println!("rho = {rho:.1}: C = {:.6e}, lower bound {:.6e}", r.c_rho, r.lower_bound);
    }
    for d in 1..=6 {
        let rd = rho_derangement(d)?;
        let c = constants(rational_to_f64(&rd), 1e-12)?;
        println!("degree {d}: rho_d = {rd} ≈ {:.6}, C = {:.6e}", rational_to_f64(&rd), c.c_rho);
    }
    Ok(())
}
