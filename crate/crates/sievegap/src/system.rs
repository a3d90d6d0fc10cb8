//! Sieving systems: one set of residue classes `I_p` per prime.
//!
//! A system is described by its [`SystemKind`]. Residue sets are computed on
//! demand and cached per prime, so a system can be shared between threads.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::poly::Poly;
use crate::primes::{is_prime_u64, primes_in};

/// How a polynomial system treats primes `p <= deg f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallPrimes {
    /// Use the actual roots of `f mod p`. Only meaningful for integer
    /// coefficients, where `f mod p` has period `p`.
    Roots,
    /// Set `I_p` empty for every `p <= deg f`.
    Empty,
}

/// The rule producing `I_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    /// `I_p = {0}` for every prime: the sifted set is the primes.
    Eratosthenes,
    /// `I_p` is the zero set of an integer-valued polynomial modulo `p`.
    Polynomial { poly: Poly, small_primes: SmallPrimes },
    /// Explicit sets for finitely many primes; all others are empty.
    Table { entries: BTreeMap<u64, Vec<u64>> },
    /// `I_p = {0, p - 2}`, the twin-prime system (not one-dimensional).
    Twin,
}

/// A sieving system with a residue cache.
#[derive(Debug)]
pub struct SievingSystem {
    kind: SystemKind,
    name: String,
    normalized: bool,
    cache: RwLock<HashMap<u64, Arc<[u64]>>>,
}

impl Clone for SievingSystem {
    fn clone(&self) -> Self {
        SievingSystem {
            kind: self.kind.clone(),
            name: self.name.clone(),
            normalized: self.normalized,
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

/// Serializable description of a system, included in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub name: String,
    pub kind: String,
    pub degree: usize,
    pub bound_b: u64,
    pub normalized: bool,
}

/// System definition file contents.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SystemFile {
    Eratosthenes,
    Twin,
    Polynomial {
        binomial_coeffs: Vec<i64>,
        #[serde(default)]
        small_primes: Option<SmallPrimes>,
    },
    Table {
        entries: Vec<(u64, Vec<u64>)>,
    },
}

impl SievingSystem {
    fn from_kind(kind: SystemKind, name: String) -> Self {
        SievingSystem {
            kind,
            name,
            normalized: false,
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// `I_p = {0}` for all `p`.
    pub fn eratosthenes() -> Self {
        Self::from_kind(SystemKind::Eratosthenes, "eratosthenes".into())
    }

    /// `I_p = {0, p - 2}`.
    pub fn twin() -> Self {
        Self::from_kind(SystemKind::Twin, "twin".into())
    }

    /// Polynomial system with the default small-prime rule: actual roots for
    /// integer coefficients, empty sets for `p <= deg f` otherwise.
    pub fn polynomial(poly: Poly) -> Self {
        let rule = if poly.has_integer_coeffs() {
            SmallPrimes::Roots
        } else {
            SmallPrimes::Empty
        };
        Self::polynomial_with(poly, rule)
    }

    /// Polynomial system with an explicit small-prime rule.
    pub fn polynomial_with(poly: Poly, small_primes: SmallPrimes) -> Self {
        let name = format!("poly:{poly}");
        Self::from_kind(SystemKind::Polynomial { poly, small_primes }, name)
    }

    /// Explicit table. Primes must be prime and residues below their prime.
    pub fn table(entries: BTreeMap<u64, Vec<u64>>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (p, mut rs) in entries {
            if !is_prime_u64(p) {
                return Err(domain!("table key {p} is not prime"));
            }
            if let Some(r) = rs.iter().find(|&&r| r >= p) {
                return Err(domain!("residue {r} is not below its prime {p}"));
            }
            rs.sort_unstable();
            rs.dedup();
            clean.insert(p, rs);
        }
        Ok(Self::from_kind(SystemKind::Table { entries: clean }, "table".into()))
    }

    /// Resolve a built-in name (`eratosthenes`, `twin`, `poly:<expr>`) or
    /// load a system definition file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec {
            "eratosthenes" => Ok(Self::eratosthenes()),
            "twin" => Ok(Self::twin()),
            _ => match spec.strip_prefix("poly:") {
                Some(expr) => Ok(Self::polynomial(expr.parse()?)),
                None => Self::load(Path::new(spec)),
            },
        }
    }

    /// Load a JSON system definition file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parse a JSON system definition.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match file {
            SystemFile::Eratosthenes => Ok(Self::eratosthenes()),
            SystemFile::Twin => Ok(Self::twin()),
            SystemFile::Polynomial {
                binomial_coeffs,
                small_primes,
            } => {
                let poly = Poly::from_binomial(binomial_coeffs.into_iter().map(Into::into).collect());
                Ok(match small_primes {
                    Some(rule) => Self::polynomial_with(poly, rule),
                    None => Self::polynomial(poly),
                })
            }
            SystemFile::Table { entries } => Self::table(entries.into_iter().collect()),
        }
    }

    /// The defining rule.
    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Short display name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Whether [`SievingSystem::normalize_shift`] has been applied.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Degree of the polynomial, 0 for other kinds.
    pub fn degree(&self) -> usize {
        match &self.kind {
            SystemKind::Polynomial { poly, .. } => poly.degree(),
            _ => 0,
        }
    }

    /// A priori bound `B` with `|I_p| <= B` for every non-degenerate prime.
    pub fn bound_b(&self) -> u64 {
        match &self.kind {
            SystemKind::Eratosthenes => 1,
            SystemKind::Twin => 2,
            SystemKind::Polynomial { poly, .. } => poly.degree().max(1) as u64,
            SystemKind::Table { entries } => {
                entries.values().map(|r| r.len() as u64).max().unwrap_or(0).max(1)
            }
        }
    }

    /// Description for reports.
    pub fn info(&self) -> SystemInfo {
        let kind = match &self.kind {
            SystemKind::Eratosthenes => "eratosthenes",
            SystemKind::Polynomial { .. } => "polynomial",
            SystemKind::Table { .. } => "table",
            SystemKind::Twin => "twin",
        };
        SystemInfo {
            name: self.name.clone(),
            kind: kind.to_string(),
            degree: self.degree(),
            bound_b: self.bound_b(),
            normalized: self.normalized,
        }
    }

    fn compute(&self, p: u64) -> Vec<u64> {
        let mut rs = match &self.kind {
            SystemKind::Eratosthenes => vec![0],
            SystemKind::Twin => {
                let mut v = vec![0, p - 2];
                v.sort_unstable();
                v.dedup();
                v
            }
            SystemKind::Table { entries } => entries.get(&p).cloned().unwrap_or_default(),
            SystemKind::Polynomial { poly, small_primes } => {
                if (p as usize) <= poly.degree() && *small_primes == SmallPrimes::Empty {
                    Vec::new()
                } else {
                    poly.roots_mod_quadratic(p)
                        .or_else(|| poly.roots_mod_bruteforce(p))
                        .unwrap_or_default()
                }
            }
        };
        if self.normalized {
            if let Some(&m) = rs.first() {
                for r in rs.iter_mut() {
                    *r -= m;
                }
            }
        }
        rs
    }

    /// The sorted residue set `I_p`.
    ///
    /// `|I_p| = p` is a degenerate prime; it is returned as is and reported by
    /// [`SievingSystem::check_nondegenerate`].
    pub fn residues(&self, p: u64) -> Result<Arc<[u64]>> {
        if !is_prime_u64(p) {
            return Err(domain!("{p} is not prime"));
        }
        if let Some(r) = self.cache.read().expect("cache lock").get(&p) {
            return Ok(r.clone());
        }
        let r: Arc<[u64]> = self.compute(p).into();
        self.cache
            .write()
            .expect("cache lock")
            .entry(p)
            .or_insert(r.clone());
        Ok(r)
    }

    /// Compute and cache `I_p` for all primes in `(lo, hi]`, in parallel.
    pub fn materialize(&self, lo: u64, hi: u64) -> Vec<(u64, Arc<[u64]>)> {
        let ps = primes_in(lo, hi);
        let missing: Vec<u64> = {
            let cache = self.cache.read().expect("cache lock");
            ps.iter().copied().filter(|p| !cache.contains_key(p)).collect()
        };
        let fresh: Vec<(u64, Arc<[u64]>)> = missing
            .into_par_iter()
            .map(|p| (p, Arc::from(self.compute(p))))
            .collect();
        {
            let mut cache = self.cache.write().expect("cache lock");
            for (p, r) in fresh {
                cache.entry(p).or_insert(r);
            }
        }
        let cache = self.cache.read().expect("cache lock");
        ps.into_iter().map(|p| (p, cache[&p].clone())).collect()
    }

    /// Primes in `(lo, hi]` with nonempty `I_p`, with their residue sets.
    pub fn active(&self, lo: u64, hi: u64) -> Vec<(u64, Arc<[u64]>)> {
        self.materialize(lo, hi)
            .into_iter()
            .filter(|(_, r)| !r.is_empty())
            .collect()
    }

    /// Error on the first prime in `(lo, hi]` with `|I_p| = p`.
    pub fn check_nondegenerate(&self, lo: u64, hi: u64) -> Result<()> {
        match self
            .materialize(lo, hi)
            .into_iter()
            .find(|(p, r)| r.len() as u64 == *p)
        {
            Some((p, _)) => Err(Error::Degenerate(p)),
            None => Ok(()),
        }
    }

    /// Translate each nonempty `I_p` so that it contains 0.
    ///
    /// This moves the sifted set by a fixed residue per prime, so densities
    /// and gap lengths are unchanged.
    pub fn normalize_shift(&self) -> Self {
        let mut out = Self::from_kind(self.kind.clone(), self.name.clone());
        out.normalized = true;
        out
    }

    /// `sigma(z, x) = prod_{z < p <= x} (1 - |I_p|/p)` as a float.
    ///
    /// The logarithms are summed with Neumaier compensation, which keeps the
    /// relative error near machine precision for every range used here.
    pub fn sigma(&self, z: u64, x: u64) -> Result<f64> {
        if z > x {
            return Err(domain!("sigma needs z <= x, got z = {z}, x = {x}"));
        }
        self.check_nondegenerate(z, x)?;
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for (p, r) in self.active(z, x) {
            let term = (-(r.len() as f64) / p as f64).ln_1p();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        Ok((sum + comp).exp())
    }

    /// `sigma(z, x)` as an exact rational.
    pub fn sigma_exact(&self, z: u64, x: u64) -> Result<BigRational> {
        if z > x {
            return Err(domain!("sigma needs z <= x, got z = {z}, x = {x}"));
        }
        self.check_nondegenerate(z, x)?;
        Ok(self
            .active(z, x)
            .into_iter()
            .fold(BigRational::one(), |acc, (p, r)| {
                acc * BigRational::new(((p - r.len() as u64) as i64).into(), (p as i64).into())
            }))
    }

    /// `P(x)`, the product of primes `p <= x` with nonempty `I_p`.
    pub fn period(&self, x: u64) -> BigUint {
        self.active(0, x)
            .into_iter()
            .fold(BigUint::one(), |acc, (p, _)| acc * p)
    }

    /// `P(x)` when it fits in a `u64`.
    pub fn period_u64(&self, x: u64) -> Option<u64> {
        self.active(0, x)
            .into_iter()
            .try_fold(1u64, |acc, (p, _)| acc.checked_mul(p))
    }

    /// Empirical support density `#{p <= x : I_p nonempty} / (x / log x)`.
    pub fn estimate_rho(&self, x: u64) -> f64 {
        if x < 2 {
            return 0.0;
        }
        let count = self.active(0, x).len() as f64;
        count / (x as f64 / (x as f64).ln())
    }

    /// Largest `|I_p|` over non-degenerate primes `p <= x`.
    pub fn observed_bound(&self, x: u64) -> u64 {
        self.materialize(0, x)
            .into_iter()
            .filter(|(p, r)| (r.len() as u64) < *p)
            .map(|(_, r)| r.len() as u64)
            .max()
            .unwrap_or(0)
    }

    /// Mertens-type track `sigma(x_i) log x_i` at increasing checkpoints.
    ///
    /// `drift_ratio` sets the one-dimensionality flag: the system is flagged
    /// when the track moves monotonically and its last two values differ by
    /// more than this ratio.
    pub fn mertens_fit(&self, checkpoints: &[u64], drift_ratio: f64) -> Result<DensityReport> {
        if checkpoints.is_empty() {
            return Err(domain!("no checkpoints"));
        }
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain!("checkpoints must be strictly increasing"));
        }
        if checkpoints[0] < 100 {
            return Err(domain!("checkpoints must be at least 100"));
        }
        let x = *checkpoints.last().expect("nonempty");
        let mut track = Vec::with_capacity(checkpoints.len());
        for &c in checkpoints {
            track.push((c, self.sigma(1, c)? * (c as f64).ln()));
        }
        let vals: Vec<f64> = track.iter().map(|t| t.1).collect();
        let monotone = vals.windows(2).all(|w| w[1] >= w[0]) || vals.windows(2).all(|w| w[1] <= w[0]);
        let last_ratio = if vals.len() >= 2 {
            vals[vals.len() - 1] / vals[vals.len() - 2]
        } else {
            1.0
        };
        let drifting = vals.len() >= 2 && monotone && (last_ratio - 1.0).abs() > drift_ratio;
        Ok(DensityReport {
            x,
            sigma: self.sigma(1, x)?,
            period_bitlength: self.period(x).bits(),
            rho_hat: self.estimate_rho(x),
            observed_bound: self.observed_bound(x),
            non_degenerate: self.check_nondegenerate(0, x).is_ok(),
            mertens_track: track,
            last_ratio,
            one_dimensional: !drifting,
        })
    }
}

/// Density statistics of a system up to a cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// The largest checkpoint.
    pub x: u64,
    /// `sigma(x)`.
    pub sigma: f64,
    /// Bits of `P(x)`.
    pub period_bitlength: u64,
    /// Empirical `rho` at `x`.
    pub rho_hat: f64,
    /// Largest `|I_p|` seen among non-degenerate primes up to `x`.
    pub observed_bound: u64,
    /// No prime up to `x` has `|I_p| = p`.
    pub non_degenerate: bool,
    /// Pairs `(x_i, sigma(x_i) log x_i)`.
    pub mertens_track: Vec<(u64, f64)>,
    /// Ratio of the last two track values.
    pub last_ratio: f64,
    /// False when the track drifts past the configured ratio.
    pub one_dimensional: bool,
}
