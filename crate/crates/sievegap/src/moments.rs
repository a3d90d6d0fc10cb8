//! Correlations of sifted sets, the error function `E_A`, and Monte Carlo
//! checks of the moment identities for the weights `lambda`.
//!
//! Expectations are over a uniform shift `b mod P(z)`. Trials draw that
//! shift from per-trial streams and are summed in trial order, so results do
//! not depend on the thread count.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{stage1_uniform, weight_table, Params};
use crate::error::{domain, Error, Result};
use crate::rng;
use crate::system::SievingSystem;
use crate::window::{sift, ShiftVector};

/// Largest `|D_H|` enumerated by [`error_e`].
pub const MAX_DIVISORS: u64 = 1_000_000;

/// `floor(H^M)`: primes above it belong to the second sieve range.
pub fn split_point(h: f64, m_exp: f64) -> u64 {
    (h.powf(m_exp) + 1e-9).floor() as u64
}

/// Whether `m mod p` lies in `I_p - I_p`.
fn in_difference_set(rs: &[u64], p: u64, m: i64) -> bool {
    let t = m.rem_euclid(p as i64) as u64;
    rs.iter()
        .any(|&a| rs.iter().any(|&b| (a + p - b) % p == t))
}

/// `E_A(m; H) = sum_{d in D_H, d > 1} A^{omega(d)} / d * [m mod d in I_d - I_d]`
/// with `D_H` the squarefree numbers whose prime factors lie in `(H^M, z]`.
///
/// By the Chinese remainder theorem the indicator factors over `p | d`, so
/// the depth-first enumeration skips every prime failing its own test.
pub fn error_e(system: &SievingSystem, a: f64, m: i64, h: f64, m_exp: f64, z: u64) -> Result<f64> {
    let primes = system.materialize(split_point(h, m_exp), z);
    if primes.len() >= 64 || (1u64 << primes.len()) > MAX_DIVISORS {
        return Err(Error::TooLarge(format!(
            "{} primes in (H^M, z] give more than {MAX_DIVISORS} squarefree d",
            primes.len()
        )));
    }
    let good: Vec<f64> = primes
        .iter()
        .filter(|(p, rs)| in_difference_set(rs, *p, m))
        .map(|(p, _)| a / *p as f64)
        .collect();
    fn dfs(good: &[f64], start: usize, term: f64, acc: &mut f64) {
        for i in start..good.len() {
            let t = term * good[i];
            *acc += t;
            dfs(good, i + 1, t, acc);
        }
    }
    let mut acc = 0.0;
    dfs(&good, 0, 1.0, &mut acc);
    Ok(acc)
}

/// [`error_e`] in exact rational arithmetic.
pub fn error_e_exact(
    system: &SievingSystem,
    a: &BigRational,
    m: i64,
    h: f64,
    m_exp: f64,
    z: u64,
) -> Result<BigRational> {
    let primes = system.materialize(split_point(h, m_exp), z);
    if primes.len() >= 64 || (1u64 << primes.len()) > MAX_DIVISORS {
        return Err(Error::TooLarge(format!(
            "{} primes in (H^M, z] give more than {MAX_DIVISORS} squarefree d",
            primes.len()
        )));
    }
    // prod_{p good} (1 + A/p) - 1 expands to the sum over d exactly.
    let one = BigRational::from_integer(BigInt::from(1));
    let prod = primes
        .iter()
        .filter(|(p, rs)| in_difference_set(rs, *p, m))
        .fold(one.clone(), |acc, (p, _)| {
            acc * (&one + a / BigRational::from_integer(BigInt::from(*p)))
        });
    Ok(prod - one)
}

/// `E_A(m; H)` in product form `prod_{p good} (1 + A/p) - 1`, without the
/// size limit.
pub fn error_e_product(system: &SievingSystem, a: f64, m: i64, h: f64, m_exp: f64, z: u64) -> f64 {
    system
        .materialize(split_point(h, m_exp), z)
        .iter()
        .filter(|(p, rs)| in_difference_set(rs, *p, m))
        .map(|(p, _)| 1.0 + a / *p as f64)
        .product::<f64>()
        - 1.0
}

/// One-sided check of the averaged bound for `E_A`: for a sequence `m_t`
/// with residue counts at most `X / phi(d) + R`,
/// `sum_t E_A(m_t + j; H) <= c (X A / H^M + R exp(A B^2 log log y))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub pass: bool,
}

/// Evaluate [`AverageCheck`] with constant `c`.
#[allow(clippy::too_many_arguments)]
pub fn average_error_check(
    system: &SievingSystem,
    a: f64,
    h: f64,
    m_exp: f64,
    z: u64,
    ms: &[i64],
    j: i64,
    x_bound: f64,
    r_bound: f64,
    y: f64,
    c: f64,
) -> AverageCheck {
    let lhs: f64 = ms
        .iter()
        .map(|&m| error_e_product(system, a, m + j, h, m_exp, z))
        .sum();
    let b = system.bound_b() as f64;
    let hm = h.powf(m_exp);
    let rhs = c * (x_bound * a / hm + r_bound * (a * b * b * y.ln().ln()).exp());
    AverageCheck {
        lhs,
        rhs,
        constant: c,
        pass: lhs <= rhs,
    }
}

/// `Pr(U ⊆ S_{lo,hi} + b)` for uniform `b`: the product over active primes
/// `p in (lo, hi]` of `1 - |N_p - I_p| / p`, with `N_p = U mod p`.
pub fn joint_probability(system: &SievingSystem, u: &[i64], lo: u64, hi: u64) -> Result<f64> {
    system.check_nondegenerate(lo, hi)?;
    let mut prod = 1.0;
    for (p, rs) in system.active(lo, hi) {
        let mut hit = vec![false; p as usize];
        for &n in u {
            let np = n.rem_euclid(p as i64) as u64;
            for &r in rs.iter() {
                hit[((np + p - r) % p) as usize] = true;
            }
        }
        let k = hit.iter().filter(|&&x| x).count();
        prod *= 1.0 - k as f64 / p as f64;
    }
    Ok(prod)
}

/// `Pr(U ⊆ S_2)` for the second sieve range `(H^M, z]`.
pub fn correlation_exact(system: &SievingSystem, u: &[i64], h: f64, m_exp: f64, z: u64) -> Result<f64> {
    joint_probability(system, u, split_point(h, m_exp), z)
}

/// A Monte Carlo estimate against its predicted value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub identity: String,
    pub predicted: f64,
    pub estimated: f64,
    pub std_error: f64,
    pub trials: u64,
    /// `(estimated - predicted) / std_error`; 0 when both the difference and
    /// the standard error vanish, `±f64::MAX` when only the error vanishes.
    pub z_score: f64,
    /// `estimated / predicted - 1`.
    pub relative_deviation: f64,
}

impl MomentReport {
    fn from_samples(identity: &str, predicted: f64, samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(domain!("no trials"));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let se = (var / n as f64).sqrt();
        let diff = mean - predicted;
        // Differences at rounding level count as zero.
        let tiny = 1e-12 * predicted.abs().max(1.0);
        let z_score = if se > tiny {
            diff / se
        } else if diff.abs() <= tiny {
            0.0
        } else {
            f64::MAX.copysign(diff)
        };
        Ok(MomentReport {
            identity: identity.to_string(),
            predicted,
            estimated: mean,
            std_error: se,
            trials: n as u64,
            z_score,
            relative_deviation: if predicted != 0.0 { mean / predicted - 1.0 } else { 0.0 },
        })
    }
}

fn trial_shift(system: &SievingSystem, z: u64, seed: u64, t: u64) -> ShiftVector {
    stage1_uniform(system, z, rng::child_seed(seed, "trial", t))
}

fn sifted_count(system: &SievingSystem, z: u64, b: &ShiftVector, y: u64) -> Result<u64> {
    if y == 0 {
        return Ok(0);
    }
    Ok(sift(system, z, b, 1, y as i64, 0)?.count())
}

/// Exact `E |(S_z + b) ∩ [1, y]|` by enumerating every `b mod P(z)`, for
/// `P(z) <= 10^5`.
pub fn first_moment_exact(system: &SievingSystem, z: u64, y: u64) -> Result<BigRational> {
    let period = system
        .period_u64(z)
        .filter(|&p| p <= 100_000)
        .ok_or_else(|| Error::TooLarge("exact mode needs P(z) <= 10^5".into()))?;
    let primes: Vec<u64> = system.active(0, z).into_iter().map(|(p, _)| p).collect();
    let total: u64 = (0..period)
        .into_par_iter()
        .map(|b| {
            let mut shift = ShiftVector::new();
            for &p in &primes {
                shift.set(p, b % p);
            }
            sifted_count(system, z, &shift, y)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(BigRational::new(BigInt::from(total), BigInt::from(period)))
}

/// Nearest `f64` to a rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Monte Carlo `E |S ∩ [1, y]|` against `sigma(z) y`.
pub fn mc_first_moment(system: &SievingSystem, z: u64, y: u64, trials: u64, seed: u64) -> Result<MomentReport> {
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| sifted_count(system, z, &trial_shift(system, z, seed, t), y).map(|c| c as f64))
        .collect::<Result<Vec<f64>>>()?;
    MomentReport::from_samples("i", system.sigma(1, z)? * y as f64, &samples)
}

/// Monte Carlo `E |S ∩ [1, y]|^2` against `(sigma(z) y)^2`.
pub fn mc_second_moment(system: &SievingSystem, z: u64, y: u64, trials: u64, seed: u64) -> Result<MomentReport> {
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            sifted_count(system, z, &trial_shift(system, z, seed, t), y).map(|c| (c as f64).powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let s = system.sigma(1, z)? * y as f64;
    MomentReport::from_samples("i-second", s * s, &samples)
}

/// Exact `E |S ∩ [1, y]|^2 = sum_{n, n'} Pr(n, n' in S)`, grouping pairs by
/// their difference.
pub fn second_moment_exact(system: &SievingSystem, z: u64, y: u64) -> Result<f64> {
    let terms = (0..y as i64)
        .into_par_iter()
        .map(|k| {
            let c = joint_probability(system, &[0, k], 0, z)?;
            let mult = if k == 0 { y as f64 } else { 2.0 * (y as i64 - k) as f64 };
            Ok(mult * c)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

/// Which weight identity to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaIdentity {
    /// `E sum_q (sum_n lambda(H; q, n))^j ≈ ((K+1) y)^j |Q_H|`.
    Ii,
    /// `E sum_{n in S ∩ [1,y]} (sum_q sum_{h <= KH} lambda(H; q, n - qh))^j
    /// ≈ (|Q_H| K H / sigma_2)^j sigma y`.
    Iii,
}

/// Monte Carlo check of a weight identity at scale `h` (which must be one
/// of `params.scales`) for each `j` in `js`.
///
/// Each trial draws `b mod P(z)`, builds every weight table of `Q_H`, and
/// evaluates the left-hand side for all requested `j` at once.
pub fn mc_lambda_moments(
    system: &SievingSystem,
    params: &Params,
    h: f64,
    identity: LambdaIdentity,
    js: &[u32],
    trials: u64,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    if let Some(j) = js.iter().find(|&&j| j > 2) {
        return Err(domain!("j must lie in {{0, 1, 2}}, got {j}"));
    }
    let scale = params
        .scales
        .iter()
        .find(|s| (s.h - h).abs() <= 1e-12 * h)
        .ok_or_else(|| domain!("scale {h} is not one of the parameter scales"))?;
    let qs = scale.primes.clone();
    let y = params.y;
    let kk = params.k as u64;
    let entries = qs.len() as u64 * (kk + 1) * y;
    if entries > 100_000_000 {
        return Err(Error::TooLarge(format!(
            "{entries} table entries; use a smaller y"
        )));
    }
    let z = params.z;
    let jlen = params.ap_len(h);
    let sigma = system.sigma(1, z)?;
    let sigma2 = system.sigma(params.split(h), z)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let b = trial_shift(system, z, seed, t);
            let tables = qs
                .iter()
                .map(|&q| weight_table(system, &b, params, h, q))
                .collect::<Result<Vec<_>>>()?;
            Ok(match identity {
                LambdaIdentity::Ii => js
                    .iter()
                    .map(|&j| tables.iter().map(|t| t.total.powi(j as i32)).sum())
                    .collect(),
                LambdaIdentity::Iii => {
                    let w = sift(system, z, &b, 1, y as i64, 0)?;
                    let inner: Vec<f64> = w
                        .members()
                        .map(|n| {
                            tables
                                .iter()
                                .map(|t| {
                                    (1..=jlen as i64)
                                        .map(|hh| t.get(n - t.q as i64 * hh))
                                        .sum::<f64>()
                                })
                                .sum()
                        })
                        .collect();
                    js.iter()
                        .map(|&j| inner.iter().map(|v| v.powi(j as i32)).sum())
                        .collect()
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let qn = qs.len() as f64;
    js.iter()
        .enumerate()
        .map(|(k, &j)| {
            let samples: Vec<f64> = per_trial.iter().map(|v| v[k]).collect();
            let (name, predicted) = match identity {
                LambdaIdentity::Ii => (
                    format!("ii-j{j}"),
                    (((kk + 1) * y) as f64).powi(j as i32) * qn,
                ),
                LambdaIdentity::Iii => (
                    format!("iii-j{j}"),
                    (qn * kk as f64 * h / sigma2).powi(j as i32) * sigma * y as f64,
                ),
            };
            MomentReport::from_samples(&name, predicted, &samples)
        })
        .collect()
}
