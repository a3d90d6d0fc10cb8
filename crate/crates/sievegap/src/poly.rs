//! Integer-valued polynomials.
//!
//! A polynomial is stored in the binomial basis `f(n) = sum_j a_j C(n, j)`
//! with integer `a_j`. A rational polynomial maps the integers into the
//! integers exactly when its binomial coefficients are integers, so this
//! representation admits examples such as `(n^7 - n)/7 + 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer-valued polynomial in the binomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Poly {
    binom: Vec<BigInt>,
}

impl TryFrom<String> for Poly {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Poly> for String {
    fn from(p: Poly) -> Self {
        p.to_string()
    }
}

fn factorial(d: usize) -> BigInt {
    (1..=d).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Standard-basis rational coefficients of `C(n, j)`.
fn binomial_standard(j: usize) -> Vec<BigRational> {
    // C(n, j) = n (n-1) ... (n-j+1) / j!
    let mut c = vec![BigInt::one()];
    for k in 0..j {
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * BigInt::from(k);
        }
        c = next;
    }
    let den = factorial(j);
    c.into_iter()
        .map(|ci| BigRational::new(ci, den.clone()))
        .collect()
}

impl Poly {
    /// Build from binomial-basis integer coefficients `a_0, a_1, ...`.
    pub fn from_binomial(mut binom: Vec<BigInt>) -> Self {
        while binom.len() > 1 && binom.last().is_some_and(Zero::is_zero) {
            binom.pop();
        }
        if binom.is_empty() {
            binom.push(BigInt::zero());
        }
        Poly { binom }
    }

    /// Build from standard-basis integer coefficients `c_0 + c_1 n + ...`.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        let rat: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Self::from_standard(&rat).expect("integer coefficients are integer-valued")
    }

    /// Build from standard-basis rational coefficients.
    ///
    /// Fails unless the polynomial maps every integer to an integer.
    pub fn from_standard(coeffs: &[BigRational]) -> Result<Self> {
        let d = coeffs.len().saturating_sub(1);
        // Values at 0..=d, then forward differences give the binomial basis.
        let mut vals: Vec<BigRational> = (0..=d)
            .map(|n| {
                let x = BigRational::from_integer(BigInt::from(n));
                coeffs
                    .iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, c| acc * &x + c)
            })
            .collect();
        let mut binom = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            let head = vals[0].clone();
            if !head.is_integer() {
                return Err(Error::Domain(
                    "polynomial is not integer-valued".to_string(),
                ));
            }
            binom.push(head.to_integer());
            vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        Ok(Self::from_binomial(binom))
    }

    /// Binomial-basis coefficients.
    pub fn binomial_coeffs(&self) -> &[BigInt] {
        &self.binom
    }

    /// Degree (0 for constants, including the zero polynomial).
    pub fn degree(&self) -> usize {
        self.binom.len() - 1
    }

    /// Standard-basis rational coefficients.
    pub fn standard_coeffs(&self) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.binom.len()];
        for (j, a) in self.binom.iter().enumerate() {
            for (i, c) in binomial_standard(j).into_iter().enumerate() {
                out[i] += c * BigRational::from_integer(a.clone());
            }
        }
        out
    }

    /// True when every standard-basis coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.standard_coeffs().iter().all(|c| c.is_integer())
    }

    /// Integer coefficients of `d! f(n)` in the standard basis, `d` the degree.
    pub fn scaled_coeffs(&self) -> Vec<BigInt> {
        let den = factorial(self.degree());
        self.standard_coeffs()
            .into_iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect()
    }

    /// True when the leading coefficient is positive.
    pub fn leading_positive(&self) -> bool {
        self.binom.last().is_some_and(Signed::is_positive)
    }

    /// Exact value at an arbitrary integer.
    pub fn eval_big(&self, n: &BigInt) -> BigInt {
        // Newton form: sum a_j C(n, j), building C(n, j) incrementally.
        let mut acc = BigInt::zero();
        let mut c = BigInt::one();
        for (j, a) in self.binom.iter().enumerate() {
            if j > 0 {
                c = c * (n - BigInt::from(j - 1)) / BigInt::from(j);
            }
            acc += a * &c;
        }
        acc
    }

    /// Exact value as `i128`, or `None` on overflow.
    pub fn eval_i128(&self, n: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        let mut c: i128 = 1;
        for (j, a) in self.binom.iter().enumerate() {
            if j > 0 {
                // C(n, j) = C(n, j-1) * (n - j + 1) / j, exact at every step.
                let num = c.checked_mul(n.checked_sub(j as i128 - 1)?)?;
                c = num / j as i128;
            }
            acc = acc.checked_add(a.to_i128()?.checked_mul(c)?)?;
        }
        Some(acc)
    }

    /// Value modulo a prime `p`, valid when `p > degree` or the
    /// coefficients are integers.
    fn eval_mod_coeffs(coeffs: &[u64], n: u64, p: u64) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| ((acc as u128 * n as u128 + c as u128) % p as u128) as u64)
    }

    fn reduce_mod(coeffs: &[BigInt], p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("reduced below p"))
            .collect()
    }

    /// Roots of `f` modulo `p` by exhaustive evaluation.
    ///
    /// For `p > degree` this uses `d! f`, which has the same roots. For
    /// `p <= degree` it needs integer coefficients (then `f mod p` has period
    /// `p`) and returns `None` otherwise.
    pub fn roots_mod_bruteforce(&self, p: u64) -> Option<Vec<u64>> {
        let coeffs = if p as usize > self.degree() {
            Self::reduce_mod(&self.scaled_coeffs(), p)
        } else if self.has_integer_coeffs() {
            let std: Vec<BigInt> = self
                .standard_coeffs()
                .into_iter()
                .map(|c| c.to_integer())
                .collect();
            Self::reduce_mod(&std, p)
        } else {
            return None;
        };
        Some(
            (0..p)
                .filter(|&n| Self::eval_mod_coeffs(&coeffs, n, p) == 0)
                .collect(),
        )
    }

    /// Roots modulo an odd prime `p > 2` for a polynomial of degree 2,
    /// using the quadratic formula with Tonelli-Shanks square roots.
    ///
    /// Returns `None` when the fast path does not apply.
    pub fn roots_mod_quadratic(&self, p: u64) -> Option<Vec<u64>> {
        if self.degree() != 2 || p <= 2 {
            return None;
        }
        let c = Self::reduce_mod(&self.scaled_coeffs(), p);
        let (c0, c1, c2) = (c[0], c[1], c[2]);
        if c2 == 0 {
            // Degenerates to a linear congruence modulo this prime.
            return Some(if c1 == 0 {
                if c0 == 0 {
                    (0..p).collect()
                } else {
                    Vec::new()
                }
            } else {
                vec![mul(p - c0 % p, inv(c1, p), p) % p]
            });
        }
        let disc = (mul(c1, c1, p) + p - mul(4 % p, mul(c2, c0, p), p)) % p;
        let Some(s) = sqrt_mod(disc, p) else {
            return Some(Vec::new());
        };
        let inv2a = inv(mul(2, c2, p), p);
        let mut r = vec![
            mul((p - c1 + s) % p, inv2a, p),
            mul((2 * p - c1 - s) % p, inv2a, p),
        ];
        r.sort_unstable();
        r.dedup();
        Some(r)
    }
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b, p);
        }
        b = mul(b, b, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    pow(a, p - 2, p)
}

/// A square root of `a` modulo an odd prime, `None` for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let (mut m, mut c, mut t, mut r) = (s, pow(z, q, p), pow(a, q, p), pow(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt, p);
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b, p);
        t = mul(t, c, p);
        r = mul(r, b, p);
    }
    Some(r)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad coefficient `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().map_err(|_| bad())?;
            let b: BigInt = b.parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn parse_term(term: &str) -> Result<(BigRational, usize)> {
    let (neg, body) = match term.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, term.strip_prefix('+').unwrap_or(term)),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("empty term in `{term}`")));
    }
    let (coef, exp) = match body.find(['n', 'x']) {
        None => (parse_rational(body)?, 0),
        Some(pos) => {
            let left = body[..pos].trim_end_matches('*');
            let mut coef = if left.is_empty() {
                BigRational::one()
            } else {
                parse_rational(left)?
            };
            let mut right = &body[pos + 1..];
            let mut exp = 1usize;
            if let Some(r) = right.strip_prefix('^') {
                let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                exp = r[..end]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                right = &r[end..];
            }
            if let Some(den) = right.strip_prefix('/') {
                let den: BigInt = den
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad divisor in `{term}`")))?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("division by zero in `{term}`")));
                }
                coef /= BigRational::from_integer(den);
            } else if !right.is_empty() {
                return Err(Error::Parse(format!("unexpected `{right}` in `{term}`")));
            }
            (coef, exp)
        }
    };
    Ok((if neg { -coef } else { coef }, exp))
}

impl std::str::FromStr for Poly {
    type Err = Error;

    /// Parse either a standard-basis expression in `n` (or `x`) such as
    /// `n^2+1` or `n^7/7 - n/7 + 1`, or a binomial-basis list such as
    /// `binom:1,0,2` meaning `1 + 2 C(n,2)`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(list) = compact.strip_prefix("binom:") {
            let list = list.trim_start_matches('[').trim_end_matches(']');
            let coeffs = list
                .split(',')
                .map(|t| {
                    t.parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad binomial coefficient `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Poly::from_binomial(coeffs));
        }
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".to_string()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut coeffs: Vec<BigRational> = Vec::new();
        for t in terms {
            let (c, e) = parse_term(t)?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, BigRational::zero());
            }
            coeffs[e] += c;
        }
        Poly::from_standard(&coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.standard_coeffs();
        let mut first = true;
        for (e, c) in coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(e == 0 && first) {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match e {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{e}"),
            };
            if e == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else if a.is_integer() {
                write!(f, "{a}*{mono}")?;
            } else {
                write!(f, "{}*{mono}/{}", a.numer(), a.denom())?;
            }
        }
        Ok(())
    }
}
