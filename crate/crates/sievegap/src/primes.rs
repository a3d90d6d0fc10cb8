//! Prime generation and primality testing.

use num_bigint::BigUint;
use rand::Rng;

/// All primes `p <= n`, by a byte sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes in the half-open range `(lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p > lo).collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for every `u64`.
///
/// The first twelve primes as bases are known to suffice below 3.3 * 10^24.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Outcome of a primality test on a possibly wide integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    /// Proven composite (or not greater than 1).
    Composite,
    /// Proven prime by the deterministic 64-bit test.
    Prime,
    /// Passed 64 random Miller-Rabin rounds; not proven.
    ProbablePrime,
}

impl Primality {
    /// True for both proven and probable primes.
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// Primality of a 128-bit value.
///
/// Values that fit in 64 bits use [`is_prime_u64`]. Wider values get trial
/// division by small primes and then 64 Miller-Rabin rounds with bases from
/// a fixed-seed stream, so the verdict is reproducible but probabilistic.
pub fn is_prime_u128(n: u128) -> Primality {
    if let Ok(small) = u64::try_from(n) {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for p in primes_up_to(1000) {
        if n.is_multiple_of(p as u128) {
            return Primality::Composite;
        }
    }
    let nb = BigUint::from(n);
    let one = BigUint::from(1u32);
    let nm1 = &nb - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut rng = crate::rng::stream(0, "miller-rabin-128", 0);
    'witness: for _ in 0..64 {
        let a = BigUint::from(rng.gen_range(2..u64::MAX));
        let mut x = a.modpow(&d, &nb);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &nb;
            if x == nm1 {
                continue 'witness;
            }
        }
        return Primality::Composite;
    }
    Primality::ProbablePrime
}
