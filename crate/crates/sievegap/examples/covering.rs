//! Random hypergraph covering on a synthetic family.
//!
//! Each edge of the family is a random block of a random progression, so
//! every vertex has the same expected degree `C2`. The example checks the
//! sparsity hypotheses, plans the rounds, and measures how many vertices
//! stay uncovered.
//!
//! ```text
//! cargo run --release --example covering
//! ```

use sievegap::cover::{ap_family, assign_indices, check_hypotheses, degree_profile, plan_rounds, run_cover, RoundPlan};

fn main() -> sievegap::error::Result<()> {
    let (c2, eta, delta) = (4.0, 0.05, 0.25);
    let plan = plan_rounds(0.01, delta, c2)?;
    println!("plan for eta = 0.01: beta = {:.2}, m = {}", plan.beta, plan.m);

    let inst = ap_family(10_000, c2, 250, 1, 3)?;
    let hyp = check_hypotheses(&inst, delta, c2, eta);
    for check in &hyp.checks {
        println!("  {check:?}");
    }
    println!("hypotheses hold: {}", hyp.all_pass);

    let plan = RoundPlan::fitted(eta, delta, c2)?;
    let parts = assign_indices(inst.n_edges(), &plan, 3, 100)?;
    let prof = degree_profile(&inst, &parts);
    println!("rounds = {}, min P_m(v) = {:.4}", plan.m, prof.kappa);
    let mut fractions = Vec::new();
    for seed in 0..20 {
        let parts = assign_indices(inst.n_edges(), &plan, seed, 100)?;
        fractions.push(run_cover(&inst, &parts, seed).uncovered_fraction);
    }
    let good = fractions.iter().filter(|&&f| f <= 10.0 * eta).count();
    println!("uncovered fractions: {fractions:.3?}");
    println!("{good}/20 runs leave at most 10 eta uncovered");
    Ok(())
}
