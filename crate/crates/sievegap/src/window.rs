//! Shifted sifted sets over explicit integer windows.
//!
//! An integer `n` belongs to `S_{z,x} + b` when `(n - b_p) mod p` avoids
//! `I_p` for every prime `z < p <= x`. The shift `b` is kept as one residue
//! per prime and never assembled into a single integer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng;
use crate::system::SievingSystem;

/// Largest window handled in one piece.
pub const MAX_WINDOW: u64 = 1 << 31;

const CHUNK_BITS: usize = 1 << 18;

/// A shift `b`, stored as `b mod p` for each relevant prime.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ShiftVector {
    entries: BTreeMap<u64, u64>,
}

impl ShiftVector {
    /// The empty shift (no residues assigned yet).
    pub fn new() -> Self {
        Self::default()
    }

    /// The zero shift for every prime `p <= x` with nonempty `I_p`.
    pub fn zero(system: &SievingSystem, x: u64) -> Self {
        ShiftVector {
            entries: system.active(0, x).into_iter().map(|(p, _)| (p, 0)).collect(),
        }
    }

    /// Independent uniform residues for active primes in `(lo, hi]`, one
    /// seeded stream per prime.
    pub fn random(system: &SievingSystem, lo: u64, hi: u64, seed: u64, tag: &str) -> Self {
        let mut s = Self::new();
        s.fill_random(system, lo, hi, seed, tag);
        s
    }

    /// Assign uniform residues to active primes in `(lo, hi]` that have none.
    pub fn fill_random(&mut self, system: &SievingSystem, lo: u64, hi: u64, seed: u64, tag: &str) {
        for (p, _) in system.active(lo, hi) {
            self.entries
                .entry(p)
                .or_insert_with(|| rng::stream(seed, tag, p).gen_range(0..p));
        }
    }

    /// Set `b mod p`.
    pub fn set(&mut self, p: u64, r: u64) {
        self.entries.insert(p, r % p);
    }

    /// `b mod p`, if assigned.
    pub fn get(&self, p: u64) -> Option<u64> {
        self.entries.get(&p).copied()
    }

    /// Iterate `(p, b mod p)` in increasing `p`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&p, &r)| (p, r))
    }

    /// Number of assigned primes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when no prime is assigned.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Restriction to primes in `(lo, hi]`.
    pub fn restrict(&self, lo: u64, hi: u64) -> Self {
        ShiftVector {
            entries: self
                .entries
                .range(lo + 1..=hi.max(lo))
                .map(|(&p, &r)| (p, r))
                .collect(),
        }
    }

    /// Convert a shift for the normalized system into one for the original
    /// system. With `I'_p = I_p - m_p`, `n - b ∈ I'_p` exactly when
    /// `n - (b - m_p) ∈ I_p`, so each residue moves by `-m_p`.
    pub fn denormalize(&self, original: &SievingSystem) -> Result<Self> {
        let mut out = Self::new();
        for (p, r) in self.iter() {
            let m = original.residues(p)?.first().copied().unwrap_or(0);
            out.set(p, (r + p - m) % p);
        }
        Ok(out)
    }

    /// Text form: one `p residue` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, r) in self.iter() {
            let _ = writeln!(s, "{p} {r}");
        }
        s
    }

    /// Parse the text form. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut out = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(p), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected `p residue`", i + 1)));
            };
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad prime", i + 1)))?;
            let r: u64 = r
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad residue", i + 1)))?;
            if !crate::primes::is_prime_u64(p) || r >= p {
                return Err(Error::Parse(format!("line {}: need prime p and r < p", i + 1)));
            }
            out.set(p, r);
        }
        Ok(out)
    }
}

/// Membership bitmap of `(S_{z,x} + b) ∩ [lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiftedWindow {
    lo: i64,
    hi: i64,
    z: u64,
    x: u64,
    words: Vec<u64>,
}

/// Result of [`SiftedWindow::largest_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    /// Difference between consecutive members, or the window length when
    /// fewer than two members exist.
    pub length: u64,
    /// Left member of the gap (window start in the sentinel case).
    pub left: i64,
    /// True when the window holds fewer than two members.
    pub sentinel: bool,
}

fn mark(words: &mut [u64], base: i64, len: usize, primes: &[(u64, Vec<u64>)]) {
    for (p, offsets) in primes {
        let p = *p as i64;
        for &o in offsets {
            // First position n >= base with n ≡ o (mod p).
            let mut i = (o as i64 - base).rem_euclid(p) as usize;
            while i < len {
                words[i / 64] &= !(1u64 << (i % 64));
                i += p as usize;
            }
        }
    }
}

/// Sift the window `[lo, hi]` by the primes in `(z, x]`.
pub fn sift(
    system: &SievingSystem,
    x: u64,
    shift: &ShiftVector,
    lo: i64,
    hi: i64,
    z: u64,
) -> Result<SiftedWindow> {
    if lo > hi {
        return Err(domain!("empty window [{lo}, {hi}]"));
    }
    if z > x {
        return Err(domain!("need z <= x, got z = {z}, x = {x}"));
    }
    let len = (hi as i128 - lo as i128 + 1) as u64;
    if len > MAX_WINDOW {
        return Err(Error::TooLarge(format!("window of {len} integers exceeds 2^31")));
    }
    system.check_nondegenerate(z, x)?;
    // For each prime, the classes (b_p + r) mod p that get removed.
    let mut primes = Vec::new();
    for (p, rs) in system.active(z, x) {
        let b = shift
            .get(p)
            .ok_or_else(|| domain!("shift has no residue for prime {p}"))?;
        primes.push((p, rs.iter().map(|r| (b + r) % p).collect::<Vec<u64>>()));
    }
    let len = len as usize;
    let mut words = vec![!0u64; len.div_ceil(64)];
    if !len.is_multiple_of(64) {
        *words.last_mut().expect("nonempty") = (1u64 << (len % 64)) - 1;
    }
    words
        .par_chunks_mut(CHUNK_BITS / 64)
        .enumerate()
        .for_each(|(c, chunk)| {
            let start = c * CHUNK_BITS;
            let clen = (len - start).min(CHUNK_BITS);
            mark(chunk, lo + start as i64, clen, &primes);
        });
    Ok(SiftedWindow { lo, hi, z, x, words })
}

/// True when `(S_x + b) ∩ [lo, hi]` is empty. Empty windows are empty.
///
/// Windows longer than [`MAX_WINDOW`] are processed in pieces.
pub fn verify_empty(
    system: &SievingSystem,
    x: u64,
    shift: &ShiftVector,
    lo: i64,
    hi: i64,
) -> Result<bool> {
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(MAX_WINDOW as i64 - 1));
        if sift(system, x, shift, start, end, 0)?.count() > 0 {
            return Ok(false);
        }
        if end == i64::MAX {
            break;
        }
        start = end + 1;
    }
    Ok(true)
}

/// Smallest member of `S_x + b` that is `>= start`, scanning in blocks of
/// `block` integers and giving up after `limit` integers.
pub fn first_member_from(
    system: &SievingSystem,
    x: u64,
    shift: &ShiftVector,
    start: i64,
    block: u64,
    limit: u64,
) -> Result<Option<i64>> {
    let block = block.clamp(1, MAX_WINDOW) as i64;
    let mut lo = start;
    while ((lo - start) as u64) < limit {
        let w = sift(system, x, shift, lo, lo + block - 1, 0)?;
        if let Some(m) = w.members().next() {
            return Ok(Some(m));
        }
        lo += block;
    }
    Ok(None)
}

/// Largest gap and member count over `[lo, hi]`, processed in pieces of at
/// most [`MAX_WINDOW`] integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapScan {
    pub gap: Gap,
    pub members_count: u64,
}

/// Scan `(S_{z,x} + b) ∩ [lo, hi]` piecewise for its largest gap.
pub fn gap_scan(
    system: &SievingSystem,
    x: u64,
    shift: &ShiftVector,
    lo: i64,
    hi: i64,
    z: u64,
) -> Result<GapScan> {
    if lo > hi {
        return Err(domain!("empty window [{lo}, {hi}]"));
    }
    let mut best: Option<Gap> = None;
    let mut prev: Option<i64> = None;
    let mut count = 0u64;
    let mut start = lo;
    loop {
        let end = (start as i128 + MAX_WINDOW as i128 - 1).min(hi as i128) as i64;
        let w = sift(system, x, shift, start, end, z)?;
        for m in w.members() {
            count += 1;
            if let Some(a) = prev {
                let g = (m - a) as u64;
                if best.is_none_or(|b| g > b.length) {
                    best = Some(Gap {
                        length: g,
                        left: a,
                        sentinel: false,
                    });
                }
            }
            prev = Some(m);
        }
        if end == hi {
            break;
        }
        start = end + 1;
    }
    let gap = best.unwrap_or(Gap {
        length: (hi as i128 - lo as i128 + 1) as u64,
        left: lo,
        sentinel: true,
    });
    Ok(GapScan {
        gap,
        members_count: count,
    })
}

impl SiftedWindow {
    /// Window start.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Window end (inclusive).
    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Sieving range `(z, x]` used.
    pub fn range(&self) -> (u64, u64) {
        (self.z, self.x)
    }

    /// Number of integers in the window.
    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    /// Always false: windows hold at least one integer.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Membership of `n`; false outside the window.
    pub fn contains(&self, n: i64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        let i = (n - self.lo) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of members.
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = i64> + '_ {
        let lo = self.lo;
        self.words.iter().enumerate().flat_map(move |(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(lo + (k * 64 + b as usize) as i64)
            })
        })
    }

    /// Largest difference between consecutive members.
    pub fn largest_gap(&self) -> Gap {
        let mut best: Option<Gap> = None;
        let mut prev: Option<i64> = None;
        for m in self.members() {
            if let Some(a) = prev {
                let g = (m - a) as u64;
                if best.is_none_or(|b| g > b.length) {
                    best = Some(Gap {
                        length: g,
                        left: a,
                        sentinel: false,
                    });
                }
            }
            prev = Some(m);
        }
        best.unwrap_or(Gap {
            length: self.len(),
            left: self.lo,
            sentinel: true,
        })
    }
}
