//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;

use sievegap::primes::primes_up_to;
use sievegap::system::SievingSystem;
use sievegap::window::ShiftVector;

/// Random table system on the primes up to `max_p` with at most `max_size`
/// classes per prime, together with a random shift.
pub fn random_table<R: Rng>(rng: &mut R, max_p: u64, max_size: usize) -> (SievingSystem, ShiftVector) {
    let mut entries = BTreeMap::new();
    let mut shift = ShiftVector::new();
    for p in primes_up_to(max_p) {
        let size = rng.gen_range(0..=max_size.min(p as usize - 1));
        let mut rs: Vec<u64> = sample(rng, p as usize, size).into_iter().map(|r| r as u64).collect();
        rs.sort_unstable();
        entries.insert(p, rs);
        shift.set(p, rng.gen_range(0..p));
    }
    (SievingSystem::table(entries).expect("valid table"), shift)
}

/// Membership of `n` in `S_{z,x} + b`, one prime at a time.
pub fn brute_member(system: &SievingSystem, shift: &ShiftVector, z: u64, x: u64, n: i64) -> bool {
    primes_up_to(x).into_iter().filter(|&p| p > z).all(|p| {
        let rs = system.residues(p).expect("residues");
        let b = shift.get(p).unwrap_or(0) as i64;
        !rs.contains(&((n - b).rem_euclid(p as i64) as u64))
    })
}

/// Largest difference of consecutive members, or `None` with fewer than two.
pub fn largest_gap_scan(members: &[i64]) -> Option<(u64, i64)> {
    let mut best: Option<(u64, i64)> = None;
    for w in members.windows(2) {
        let g = (w[1] - w[0]) as u64;
        if best.is_none_or(|(b, _)| g > b) {
            best = Some((g, w[0]));
        }
    }
    best
}

/// Active primes in `(lo, hi]` with their classes.
fn active(system: &SievingSystem, lo: u64, hi: u64) -> Vec<(u64, Vec<u64>)> {
    primes_up_to(hi)
        .into_iter()
        .filter(|&p| p > lo)
        .map(|p| (p, system.residues(p).expect("residues").to_vec()))
        .filter(|(_, rs)| !rs.is_empty())
        .collect()
}

/// Product of the active primes in `(lo, hi]`.
pub fn active_period(system: &SievingSystem, lo: u64, hi: u64) -> u128 {
    active(system, lo, hi).iter().map(|(p, _)| *p as u128).product()
}

/// `Pr(U ⊆ S_{lo,hi} + b)` by counting every `b mod P`.
pub fn correlation_by_enumeration(system: &SievingSystem, u: &[i64], lo: u64, hi: u64) -> f64 {
    let primes = active(system, lo, hi);
    let period: u64 = primes.iter().map(|(p, _)| p).product();
    let hits = (0..period as i64)
        .filter(|&b| {
            u.iter().all(|&n| {
                primes
                    .iter()
                    .all(|(p, rs)| !rs.contains(&((n - b).rem_euclid(*p as i64) as u64)))
            })
        })
        .count();
    hits as f64 / period as f64
}

/// `sum_{d in D, d > 1} A^{omega(d)} / d * [m mod d in I_d - I_d]`, with
/// `I_d` listed through the Chinese remainder theorem and the difference
/// condition tested element by element.
pub fn error_e_definitional(system: &SievingSystem, a: &BigRational, m: i64, lo: u64, hi: u64) -> BigRational {
    let primes = active(system, lo, hi);
    let mut total = BigRational::zero();
    for mask in 1u64..(1 << primes.len()) {
        let chosen: Vec<&(u64, Vec<u64>)> = (0..primes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &primes[i])
            .collect();
        let d: u128 = chosen.iter().map(|(p, _)| *p as u128).product();
        let in_id = |c: u128| chosen.iter().all(|(p, rs)| rs.contains(&((c % *p as u128) as u64)));
        let mut elements = vec![0u128];
        let mut modulus = 1u128;
        for (p, rs) in &chosen {
            let p = *p as u128;
            let mut next = Vec::with_capacity(elements.len() * rs.len());
            for &e in &elements {
                for &r in rs {
                    let mut c = e;
                    while c % p != r as u128 {
                        c += modulus;
                    }
                    next.push(c);
                }
            }
            modulus *= p;
            elements = next;
        }
        let shift = m.rem_euclid(d as i64) as u128;
        let hit = elements.iter().any(|&e| in_id((e + d - shift) % d));
        if hit {
            let mut term = BigRational::one();
            for _ in 0..chosen.len() {
                term *= a;
            }
            total += term / BigRational::from_integer(BigInt::from(d));
        }
    }
    total
}
