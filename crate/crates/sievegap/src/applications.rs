//! Constants and applications: `C(rho)`, derangement densities, composite
//! runs of polynomial values, and coprimality witnesses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{construct, derive_params, trivial_baseline, ParamRequest, Stage2Mode};
use crate::error::{domain, Error, Result};
use crate::poly::Poly;
use crate::primes::{is_prime_u128, primes_up_to, Primality};
use crate::system::{SievingSystem, SmallPrimes};
use crate::window::ShiftVector;

/// `g(delta) = (4 + delta) 10^{2 delta} / log(1 / (2 delta))`, increasing on
/// `(0, 1/2)`.
pub fn boundary(delta: f64) -> f64 {
    (4.0 + delta) * 10f64.powf(2.0 * delta) / (1.0 / (2.0 * delta)).ln()
}

/// `C(rho) = sup { delta in (0, 1/2) : g(delta) < rho }`, by bisection on
/// `[tol, 1/2 - tol]` with at most 200 steps. Values below `tol` (small
/// `rho`) are resolved by bisection on `log delta`.
pub fn c_rho(rho: f64, tol: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain!("rho must be positive, got {rho}"));
    }
    if !(tol > 0.0 && tol < 0.25) {
        return Err(domain!("tolerance must lie in (0, 1/4), got {tol}"));
    }
    let (mut lo, mut hi) = (tol, 0.5 - tol);
    if boundary(lo) >= rho {
        return Ok(c_rho_below(rho, tol));
    }
    if boundary(hi) < rho {
        return Ok(0.5);
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if boundary(mid) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `C(rho)` when it lies below `tol`: bisection on `log delta` over
/// `[log f64::MIN_POSITIVE, log tol]`. Returns 0 when even the smallest
/// normal `delta` violates the bound.
fn c_rho_below(rho: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (f64::MIN_POSITIVE.ln(), tol.ln());
    if boundary(lo.exp()) >= rho {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if boundary(mid.exp()) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

/// `C(rho)` with the lower bound `e^{-1-4/rho}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub rho: f64,
    pub c_rho: f64,
    pub lower_bound: f64,
    /// `g(c_rho - tol) < rho`.
    pub delta1_check: bool,
    pub tol: f64,
}

/// Evaluate [`ConstantsReport`].
pub fn constants(rho: f64, tol: f64) -> Result<ConstantsReport> {
    let c = c_rho(rho, tol)?;
    let probe = if c > tol { c - tol } else { c * (1.0 - 1e-9) };
    Ok(ConstantsReport {
        rho,
        c_rho: c,
        lower_bound: (-1.0 - 4.0 / rho).exp(),
        delta1_check: probe > 0.0 && boundary(probe) < rho,
        tol,
    })
}

/// `rho_d = sum_{k=1}^{d} (-1)^{k+1} / k!`, the proportion of permutations
/// of `d` letters with a fixed point.
pub fn rho_derangement(d: u32) -> Result<BigRational> {
    if d == 0 {
        return Err(domain!("d must be at least 1"));
    }
    let mut acc = BigRational::zero();
    let mut fact = BigInt::one();
    for k in 1..=d {
        fact *= k;
        let term = BigRational::new(BigInt::one(), fact.clone());
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Whether a polynomial value counts as composite: values `<= 1` count as
/// non-prime. The second component marks a probabilistic verdict.
fn non_prime(v: i128) -> (bool, bool) {
    if v <= 1 {
        return (true, false);
    }
    match is_prime_u128(v as u128) {
        Primality::Composite => (true, false),
        Primality::Prime => (false, false),
        Primality::ProbablePrime => (false, true),
    }
}

fn value(f: &Poly, n: i128) -> Result<i128> {
    f.eval_i128(n)
        .ok_or_else(|| Error::Overflow(format!("f({n}) does not fit in 128 bits")))
}

/// A run of consecutive `n` with `f(n)` not prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeRun {
    pub start: u64,
    pub length: u64,
    /// Some values exceeded 64 bits and were tested probabilistically.
    pub probabilistic: bool,
}

#[derive(Clone, Copy)]
struct ChunkRuns {
    len: u64,
    prefix: u64,
    suffix: u64,
    best_start: u64,
    best_len: u64,
    probabilistic: bool,
}

/// Longest run of consecutive `n in [1, x_max]` with `f(n)` not prime, by a
/// chunk-parallel linear scan. Ties go to the smallest start.
pub fn composite_run_bruteforce(f: &Poly, x_max: u64) -> Result<CompositeRun> {
    if x_max == 0 {
        return Ok(CompositeRun {
            start: 1,
            length: 0,
            probabilistic: false,
        });
    }
    if x_max > 100_000_000 {
        return Err(domain!("X must be at most 10^8"));
    }
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<u64> = (0..x_max.div_ceil(CHUNK)).collect();
    let parts = chunks
        .par_iter()
        .map(|&c| -> Result<ChunkRuns> {
            let lo = 1 + c * CHUNK;
            let hi = (lo + CHUNK - 1).min(x_max);
            let mut r = ChunkRuns {
                len: hi - lo + 1,
                prefix: 0,
                suffix: 0,
                best_start: lo,
                best_len: 0,
                probabilistic: false,
            };
            let mut run = 0u64;
            let mut in_prefix = true;
            for n in lo..=hi {
                let (np, prob) = non_prime(value(f, n as i128)?);
                r.probabilistic |= prob;
                if np {
                    run += 1;
                    if run > r.best_len {
                        r.best_len = run;
                        r.best_start = n + 1 - run;
                    }
                } else {
                    if in_prefix {
                        r.prefix = run;
                        in_prefix = false;
                    }
                    run = 0;
                }
            }
            if in_prefix {
                r.prefix = run;
            }
            r.suffix = run;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = CompositeRun {
        start: 1,
        length: 0,
        probabilistic: false,
    };
    let mut open = 0u64;
    let mut pos = 1u64;
    for r in &parts {
        best.probabilistic |= r.probabilistic;
        // A run crossing into this chunk starts before every run inside it.
        let crossing = open + r.prefix;
        if crossing > best.length {
            best.length = crossing;
            best.start = pos - open;
        }
        if r.best_len > best.length {
            best.length = r.best_len;
            best.start = r.best_start;
        }
        open = if r.prefix == r.len { open + r.len } else { r.suffix };
        pos += r.len;
    }
    Ok(best)
}

/// Fixed prime divisors of `f`: the primes dividing every coefficient of
/// `f` in the binomial basis, which are the primes dividing every value.
pub fn fixed_prime_divisors(f: &Poly) -> Vec<u64> {
    let g = f
        .binomial_coeffs()
        .iter()
        .fold(BigInt::zero(), |g, a| g.gcd(a));
    if g.is_zero() {
        return Vec::new();
    }
    let d = f.degree().max(1) as u64;
    primes_up_to(d).into_iter().filter(|&p| (&g % p).is_zero()).collect()
}

/// `b mod prod p` from per-prime residues.
pub fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for &(p, a) in residues {
        let pb = BigInt::from(p);
        let rm = (&r % &pb).to_u64().unwrap_or(0);
        let mm = (&m % &pb).to_u64().unwrap_or(0);
        let inv = mod_inverse(mm, p);
        let t = ((a + p - rm) % p) as u128 * inv as u128 % p as u128;
        r += &m * BigInt::from(t as u64);
        m *= pb;
    }
    (r, m)
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let e = num_integer::Integer::extended_gcd(&(a as i128), &(p as i128));
    e.x.rem_euclid(p as i128) as u64
}

/// A composite run built from a long gap in a polynomial sifted set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructedRun {
    /// Sieving cutoff used.
    pub x: u64,
    pub start: u64,
    pub length: u64,
    /// Length certified by the trivial construction on the same seed.
    pub baseline_length: u64,
    /// `P(x)`.
    pub period: u64,
    /// Every `f(n)` in the run was checked and is not prime.
    pub verified: bool,
    pub probabilistic: bool,
    /// The run comes from a fixed prime divisor of `f`.
    pub degenerate: bool,
}

/// Build a run of `n in [X/2, X]` with `f(n)` composite.
///
/// The cutoff is the largest `x >= (1/2) log X` with `P(x) <= X/4`. A
/// constructed shift `b` with `[1, L]` outside `S_x + b` gives
/// `f(N + i - 1) ≡ 0 (mod p)` for some `p <= x` and every `i <= L` when
/// `N ≡ 1 - b (mod P(x))`, and `N` is the least such integer `>= X/2`.
/// Each value in the run is then tested for primality.
pub fn composite_run_constructed(f: &Poly, x_max: u64, seed: u64) -> Result<ConstructedRun> {
    if !f.leading_positive() || f.degree() == 0 {
        return Err(domain!("f must be nonconstant with positive leading coefficient"));
    }
    let half = x_max.div_ceil(2);
    if !fixed_prime_divisors(f).is_empty() {
        let length = x_max - half + 1;
        let (ok, prob) = check_run(f, half, length)?;
        if !ok {
            return Err(domain!("a value in [{half}, {x_max}] is prime"));
        }
        return Ok(ConstructedRun {
            x: 0,
            start: half,
            length,
            baseline_length: length,
            period: 1,
            verified: true,
            probabilistic: prob,
            degenerate: true,
        });
    }
    let system = SievingSystem::polynomial(f.clone());
    let x0 = ((x_max as f64).ln() / 2.0).ceil().max(2.0) as u64;
    let fits = |x: u64| system.period_u64(x).is_some_and(|p| p <= x_max / 4);
    if !fits(x0) {
        return Err(domain!("X = {x_max} is too small for a cutoff x >= {x0}"));
    }
    let mut x = x0;
    while x < 10_000 && fits(x + 1) {
        x += 1;
    }
    let period = system.period_u64(x).expect("checked above");
    let params = derive_params(&system, &ParamRequest::desk(&system, x))?;
    let c = construct(&system, &params, Stage2Mode::Sample, seed)?;
    let baseline = trivial_baseline(&system, x, seed)?;
    let b: Vec<(u64, u64)> = c.shift.iter().filter(|(p, _)| *p <= x).collect();
    let (bb, m) = crt(&b);
    let m_u = m.to_u64().expect("period fits in 64 bits");
    let residue = (BigInt::one() - bb).mod_floor(&m).to_u64().expect("reduced");
    let start = half + (residue + m_u - half % m_u) % m_u;
    let length = c.length;
    if start + length > x_max + 1 {
        return Err(domain!("run [{start}, {}] leaves [1, X]", start + length - 1));
    }
    let (ok, prob) = check_run(f, start, length)?;
    if !ok {
        return Err(domain!("a value in the constructed run starting at {start} is prime"));
    }
    Ok(ConstructedRun {
        x,
        start,
        length,
        baseline_length: baseline.length,
        period,
        verified: true,
        probabilistic: prob,
        degenerate: false,
    })
}

fn check_run(f: &Poly, start: u64, length: u64) -> Result<(bool, bool)> {
    let checks = (start..start + length)
        .into_par_iter()
        .map(|n| value(f, n as i128).map(non_prime))
        .collect::<Result<Vec<_>>>()?;
    Ok((checks.iter().all(|c| c.0), checks.iter().any(|c| c.1)))
}

/// Remove every prime factor `<= d` from `g`.
fn strip_small(mut g: BigInt, d: u64) -> BigInt {
    for p in primes_up_to(d) {
        let pb = BigInt::from(p);
        while !g.is_zero() && (&g % &pb).is_zero() {
            g /= &pb;
        }
    }
    g
}

/// Whether `gcd(a, b)` has a prime factor greater than `d`.
pub fn shares_large_prime(a: &BigInt, b: &BigInt, d: u64) -> bool {
    let g = a.gcd(b);
    if g.is_zero() {
        // Both values vanish, so every prime divides both.
        return true;
    }
    strip_small(g, d).abs() > BigInt::one()
}

/// Check that each of `f(n+1), ..., f(n+k)` shares a prime factor greater
/// than `deg f` with another. Returns the first index without a partner.
pub fn verify_coprimality_witness(f: &Poly, n: &BigInt, k: u64) -> std::result::Result<(), u64> {
    let d = f.degree() as u64;
    let vals: Vec<BigInt> = (1..=k).map(|i| f.eval_big(&(n + BigInt::from(i)))).collect();
    let bad: Vec<u64> = (0..k as usize)
        .into_par_iter()
        .filter(|&i| !(0..k as usize).any(|j| j != i && shares_large_prime(&vals[i], &vals[j], d)))
        .map(|i| i as u64 + 1)
        .collect();
    match bad.first() {
        Some(&i) => Err(i),
        None => Ok(()),
    }
}

/// Outcome of a witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoprimeSearch {
    pub k: u64,
    pub bound: u64,
    /// Smallest witness `n <= bound`, if any.
    pub witness: Option<u64>,
}

/// Smallest `n in [0, bound]` such that each of `f(n+1), ..., f(n+k)`
/// shares a prime factor greater than `deg f` with another of them.
pub fn coprimality_witness(f: &Poly, k: u64, bound: u64) -> Result<CoprimeSearch> {
    if k < 2 {
        return Err(domain!("k must be at least 2"));
    }
    let d = f.degree() as u64;
    let ok_at = |n: u64| -> Result<bool> {
        let vals = (1..=k)
            .map(|i| value(f, (n + i) as i128).map(BigInt::from))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..vals.len()).all(|i| {
            (0..vals.len()).any(|j| j != i && shares_large_prime(&vals[i], &vals[j], d))
        }))
    };
    const BLOCK: u64 = 4096;
    let mut lo = 0u64;
    while lo <= bound {
        let hi = (lo + BLOCK - 1).min(bound);
        let found = (lo..=hi)
            .into_par_iter()
            .map(|n| ok_at(n).map(|ok| ok.then_some(n)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if found.is_some() {
            return Ok(CoprimeSearch {
                k,
                bound,
                witness: found,
            });
        }
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
    Ok(CoprimeSearch {
        k,
        bound,
        witness: None,
    })
}

/// A witness built from a gap in the sifted set of `f` (primes `<= deg f`
/// excluded), completed by pairing the remaining indices through larger
/// primes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    pub x: u64,
    pub k: u64,
    /// The witness `n`, in decimal.
    pub n: String,
    /// Certified gap length of the construction.
    pub gap: u64,
    /// The gap alone reaches `k`.
    pub gap_reached: bool,
    /// Primes above `x` used to pair left-over indices.
    pub pairing_primes_used: usize,
    /// Every index passed the gcd check.
    pub verified: bool,
}

/// Build a coprimality witness for `k = floor(2x)` consecutive values.
///
/// A construction at cutoff `x` gives residues `n ≡ -b_p (mod p)` for
/// `p <= x`, so each index in the gap has `p | f(n + i)` for some `p`.
/// Indices without a partner sharing such a prime are then paired: for an
/// unused prime `p > x` with roots `r, r'` of `f` and an index `j` with
/// `j - i ≡ r' - r (mod p)`, setting `n ≡ r - i (mod p)` makes `p` divide
/// both `f(n + i)` and `f(n + j)`. The result is checked by gcds.
pub fn gap_coprimality_witness(f: &Poly, x: u64, seed: u64) -> Result<GapWitness> {
    let d = f.degree() as u64;
    if d == 0 {
        return Err(domain!("f must be nonconstant"));
    }
    let k = 2 * x;
    if k < 2 {
        return Err(domain!("x must be at least 1"));
    }
    let system = SievingSystem::polynomial_with(f.clone(), SmallPrimes::Empty);
    let params = derive_params(&system, &ParamRequest::desk(&system, x))?;
    let c = construct(&system, &params, Stage2Mode::Sample, seed)?;
    let base = trivial_baseline(&system, x, seed)?;
    let (gap, shift) = if base.length > c.length {
        (base.length, base.shift)
    } else {
        (c.length, c.shift)
    };
    // n ≡ -b_p (mod p) for the active primes p <= x.
    let mut congruences: Vec<(u64, u64)> = Vec::new();
    let mut paired = vec![false; k as usize + 1];
    for (p, rs) in system.active(0, x) {
        let r = shift_residue(&shift, p);
        let n_mod = (p - r) % p;
        congruences.push((p, n_mod));
        let hit: Vec<u64> = (1..=k)
            .filter(|&i| rs.contains(&((n_mod + i) % p)))
            .collect();
        if hit.len() >= 2 {
            for &i in &hit {
                paired[i as usize] = true;
            }
        }
    }
    let fz = f.scaled_coeffs();
    let small = primes_up_to(1_000_000);
    let mut resultants: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    let mut used = BTreeSet::new();
    for i in 1..=k {
        if paired[i as usize] {
            continue;
        }
        // Unpaired partners first, nearest first.
        let mut partners: Vec<u64> = (1..=k).filter(|&j| j != i).collect();
        partners.sort_by_key(|&j| (paired[j as usize], j.abs_diff(i), j));
        let mut found = None;
        'search: for j in partners {
            let delta = j as i64 - i as i64;
            let candidates = resultants
                .entry(delta)
                .or_insert_with(|| shift_resultant_primes(&fz, delta, &small));
            for &p in candidates.iter() {
                if p <= x.max(d) || used.contains(&p) {
                    continue;
                }
                let roots = f
                    .roots_mod_bruteforce(p)
                    .ok_or_else(|| domain!("no roots available modulo {p}"))?;
                if let Some(r) = root_pair(&roots, p, delta) {
                    found = Some((j, p, r));
                    break 'search;
                }
            }
        }
        let (j, p, r) = found.ok_or_else(|| domain!("no pairing prime found for index {i}"))?;
        let n_mod = (r + p - i % p) % p;
        congruences.push((p, n_mod));
        used.insert(p);
        paired[i as usize] = true;
        paired[j as usize] = true;
        let roots = f.roots_mod_bruteforce(p).unwrap_or_default();
        let hit: Vec<u64> = (1..=k)
            .filter(|&t| roots.contains(&((n_mod + t) % p)))
            .collect();
        if hit.len() >= 2 {
            for &t in &hit {
                paired[t as usize] = true;
            }
        }
    }
    let used = used.len();
    let (n, _) = crt(&congruences);
    let verified = verify_coprimality_witness(f, &n, k).is_ok();
    if !verified {
        return Err(domain!("constructed witness failed the gcd check"));
    }
    Ok(GapWitness {
        x,
        k,
        n: n.to_string(),
        gap,
        gap_reached: gap >= k,
        pairing_primes_used: used,
        verified,
    })
}

fn shift_residue(shift: &ShiftVector, p: u64) -> u64 {
    shift.get(p).unwrap_or(0)
}

/// A root `r` of `f mod p` with `r + delta` also a root.
fn root_pair(roots: &[u64], p: u64, delta: i64) -> Option<u64> {
    let dm = delta.rem_euclid(p as i64) as u64;
    roots.iter().copied().find(|&r| roots.contains(&((r + dm) % p)))
}

/// Standard coefficients of `F(t + delta)`.
fn shift_poly(c: &[BigInt], delta: i64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); c.len()];
    let d = BigInt::from(delta);
    for (k, ck) in c.iter().enumerate() {
        // (t + delta)^k = sum_i C(k, i) delta^{k-i} t^i
        let mut binom = BigInt::one();
        for (i, o) in out.iter_mut().enumerate().take(k + 1) {
            *o += ck * &binom * d.pow((k - i) as u32);
            binom = binom * (k - i) / (i + 1);
        }
    }
    out
}

/// Determinant by fraction-free elimination.
fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if piv != c {
            m.swap(piv, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for j in c + 1..n {
                m[r][j] = (&m[r][j] * &m[c][c] - &m[r][c] * &m[c][j]) / &prev;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[c][c].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two polynomials given by standard coefficients with
/// nonzero leading terms.
fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..db {
        for (i, c) in a.iter().rev().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..da {
        for (i, c) in b.iter().rev().enumerate() {
            m[db + r][r + i] = c.clone();
        }
    }
    determinant(m)
}

/// Primes `p` that may carry roots `r` and `r + delta` of `F`: the prime
/// factors of `Res(F(t), F(t + delta) - F(t))`, found by trial division up
/// to the largest prime in `small` (a cofactor is kept when it is then known
/// to be prime and at most `10^7`). Sorted ascending.
fn shift_resultant_primes(fz: &[BigInt], delta: i64, small: &[u64]) -> Vec<u64> {
    let shifted = shift_poly(fz, delta);
    let mut g: Vec<BigInt> = shifted.iter().zip(fz).map(|(a, b)| a - b).collect();
    while g.last().is_some_and(Zero::is_zero) {
        g.pop();
    }
    if g.is_empty() {
        return Vec::new();
    }
    let mut r = resultant(fz, &g).abs();
    if r.is_zero() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for &p in small {
        let pb = BigInt::from(p);
        if &pb * &pb > r {
            break;
        }
        if (&r % &pb).is_zero() {
            out.push(p);
            while (&r % &pb).is_zero() {
                r /= &pb;
            }
        }
    }
    let limit = small.last().copied().unwrap_or(1);
    if let Some(c) = r.to_u64() {
        if c > 1 && c <= 10_000_000 && (c <= limit || (c as u128) < (limit as u128).pow(2)) {
            out.push(c);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
