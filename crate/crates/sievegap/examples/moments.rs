//! Moments of the sifted set over a random shift.
//!
//! The mean of `|S ∩ [1, y]|` over all shifts equals `sigma y` exactly. The
//! weighted sums over the medium primes have predicted means, compared here
//! against Monte Carlo estimates with z-scores.
//!
//! ```text
//! cargo run --release --example moments
//! ```

use sievegap::construction::{derive_params, ParamRequest};
use sievegap::moments::{correlation_exact, first_moment_exact, mc_first_moment, mc_lambda_moments, LambdaIdentity};
use sievegap::system::SievingSystem;

fn main() -> sievegap::error::Result<()> {
    let system = SievingSystem::eratosthenes();
    let exact = first_moment_exact(&system, 7, 50)?;
    println!("mean of |S_7 ∩ [1, 50]| over 210 shifts: {exact}");
    let mc = mc_first_moment(&system, 30, 500, 500, 1)?;
    println!("Monte Carlo at z = 30, y = 500: {mc:?}");

    let (h, m_exp) = (3.0, 4.6);
    let u = [0, 2, 6];
    println!(
        "Pr({u:?} in S_2) over the primes in (H^M, 200]: {:.6}",
        correlation_exact(&system, &u, h, m_exp, 200)?
    );

    let req = ParamRequest {
        m_exp,
        k: 3,
        force_z: Some(200),
        force_y: Some(2_000),
        force_scales: Some(vec![h]),
        ..ParamRequest::defaults(&system, 10_000)
    };
    let params = derive_params(&system, &req)?;
    for identity in [LambdaIdentity::Ii, LambdaIdentity::Iii] {
        for r in mc_lambda_moments(&system, &params, h, identity, &[0, 1, 2], 200, 1)? {
            println!(
                "{:>7}: predicted {:.4e}, estimated {:.4e}, z = {:+.2}",
                r.identity, r.predicted, r.estimated, r.z_score
            );
        }
    }
    Ok(())
}
