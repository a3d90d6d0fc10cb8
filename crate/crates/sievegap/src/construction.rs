//! The three-stage randomized construction of a shift `b` with a long
//! initial run `[1, L]` outside `S_x + b`, and the trivial baseline.
//!
//! Stage 1 draws `b mod p` uniformly for `p <= z`. Stage 2 treats each prime
//! `q` of the scale sets `Q_H`: it weighs every start `n` in `(-Ky, y]` by
//! `lambda(H; q, n)` and sets `b ≡ n_q (mod q)`, which removes the whole
//! progression `n_q + qh`. Remaining primes up to `x/2` get uniform residues.
//! Stage 3 matches the surviving integers, in increasing order, with the
//! primes in `(x/2, x]`.
//!
//! The construction runs on the normalized system (`0 ∈ I_p`), where
//! `b ≡ m (mod p)` removes `m`. Returned shifts are converted back to the
//! caller's system and the run `[1, L]` is re-verified there.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{self, CoverInstance, EdgeDist, RoundPlan};
use crate::error::{domain, Error, Result};
use crate::rng;
use crate::system::SievingSystem;
use crate::window::{first_member_from, sift, verify_empty, ShiftVector};

/// Inputs to [`derive_params`]. `None` overrides use the defining formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRequest {
    pub x: u64,
    pub delta: f64,
    /// The split exponent `M`.
    pub m_exp: f64,
    pub k: u32,
    pub xi: f64,
    pub force_z: Option<u64>,
    pub force_y: Option<u64>,
    pub force_scales: Option<Vec<f64>>,
    /// Use every admissible prime in each scale range instead of the
    /// smallest ones up to the target count.
    pub all_q: bool,
}

impl ParamRequest {
    /// Defaults: `K = 3`, `M = 4.6`, `xi = 1.1`, and
    /// `delta = min(0.9 C(rho_hat), 0.45)` with `rho_hat` measured at `x`.
    pub fn defaults(system: &SievingSystem, x: u64) -> Self {
        let rho = system.estimate_rho(x.max(2)).clamp(1e-6, 1.0);
        let delta = crate::applications::c_rho(rho, 1e-9)
            .map(|c| (0.9 * c).min(0.45))
            .unwrap_or(0.45);
        ParamRequest {
            x,
            delta,
            m_exp: 4.6,
            k: 3,
            xi: 1.1,
            force_z: None,
            force_y: None,
            force_scales: None,
            all_q: false,
        }
    }
}

impl ParamRequest {
    /// Desk-scale preset: `z = x/4`, `y = 4x/5`, `M = 1.5`, `K = 2`,
    /// `xi = 1.1`. At implementable `x` the defining formulas leave no
    /// scales, so this preset keeps the stage-2 mechanism active.
    pub fn desk(system: &SievingSystem, x: u64) -> Self {
        ParamRequest {
            m_exp: 1.5,
            k: 2,
            force_z: Some(x / 4),
            force_y: Some(x * 4 / 5),
            ..Self::defaults(system, x)
        }
    }
}

/// One scale `H` with its primes `Q_H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub h: f64,
    pub primes: Vec<u64>,
}

/// Derived construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub x: u64,
    pub delta: f64,
    pub m_exp: f64,
    pub k: u32,
    pub xi: f64,
    pub y: u64,
    pub z: u64,
    pub scales: Vec<Scale>,
    /// No scales: stage 2 does nothing and the result equals the baseline.
    pub degraded: bool,
    pub warnings: Vec<String>,
}

impl Params {
    /// All stage-2 primes with their scale, in increasing order of `q`.
    pub fn stage2_primes(&self) -> Vec<(f64, u64)> {
        let mut v: Vec<(f64, u64)> = self
            .scales
            .iter()
            .flat_map(|s| s.primes.iter().map(move |&q| (s.h, q)))
            .collect();
        v.sort_by_key(|&(_, q)| q);
        v
    }

    /// `floor(K H)`, the progression length at scale `H`.
    pub fn ap_len(&self, h: f64) -> u64 {
        (self.k as f64 * h + 1e-9).floor() as u64
    }

    /// Largest prime index of the first sieve range `S_1` at scale `H`:
    /// `min(floor(H^M), z)`.
    pub fn split(&self, h: f64) -> u64 {
        (h.powf(self.m_exp) + 1e-9).floor().min(self.z as f64) as u64
    }
}

/// Compute `y`, `z`, the scales and the prime sets `Q_H`.
pub fn derive_params(system: &SievingSystem, req: &ParamRequest) -> Result<Params> {
    let x = req.x;
    let mut warnings = Vec::new();
    if x < 3 {
        return Err(domain!("x must be at least 3, got {x}"));
    }
    if x < 100 {
        warnings.push(format!("x = {x} is below 100"));
    }
    if !(req.delta > 0.0 && req.delta < 0.5) {
        return Err(domain!("delta must lie in (0, 1/2), got {}", req.delta));
    }
    if req.k < 2 {
        return Err(domain!("K must be at least 2, got {}", req.k));
    }
    if !(req.xi > 1.0) {
        return Err(domain!("xi must exceed 1, got {}", req.xi));
    }
    if !(req.m_exp > 1.0) {
        return Err(domain!("M must exceed 1, got {}", req.m_exp));
    }
    if !(req.m_exp > 4.0 + req.delta && req.m_exp <= 5.0) {
        warnings.push(format!(
            "M = {} lies outside (4 + delta, 5]",
            req.m_exp
        ));
    }
    let rho = system.estimate_rho(x);
    if let Ok(c) = crate::applications::c_rho(rho.clamp(1e-6, 1.0), 1e-9) {
        if req.delta >= c {
            warnings.push(format!("delta = {} is not below C(rho_hat) = {c:.6}", req.delta));
        }
    }
    let lx = (x as f64).ln();
    let y = req
        .force_y
        .unwrap_or_else(|| (x as f64 * lx.powf(req.delta)).ceil() as u64);
    let z = req
        .force_z
        .unwrap_or_else(|| (y as f64 * lx.ln() / lx.sqrt()).round().max(1.0) as u64);
    let hs: Vec<f64> = match &req.force_scales {
        Some(s) => s.clone(),
        None => {
            let lo = 2.0 * y as f64 / x as f64;
            let hi = y as f64 / (req.xi * z as f64);
            let k0 = (lo.ln() / req.xi.ln() - 1e-9).ceil() as i64;
            let k1 = (hi.ln() / req.xi.ln() + 1e-9).floor() as i64;
            (k0..=k1).map(|k| req.xi.powi(k as i32)).collect()
        }
    };
    let mut scales = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    for h in hs {
        if !(h > 0.0) {
            return Err(domain!("scale {h} is not positive"));
        }
        let top = y as f64 / h;
        let bottom = top / req.xi;
        let cands: Vec<u64> = system
            .active(bottom.floor() as u64, top.floor() as u64)
            .into_iter()
            .map(|(q, _)| q)
            .filter(|&q| q as f64 > bottom && q > z && 2 * q <= x && !used.contains(&q))
            .collect();
        let target = (rho * (1.0 - 1.0 / req.xi) * y as f64 / (h * lx)).ceil() as usize;
        let take = if req.all_q { cands.len() } else { target.min(cands.len()) };
        let primes: Vec<u64> = cands.into_iter().take(take).collect();
        used.extend(primes.iter().copied());
        scales.push(Scale { h, primes });
    }
    let degraded = scales.iter().all(|s| s.primes.is_empty());
    if degraded {
        warnings.push("no usable scales: stage 2 is skipped".into());
    }
    Ok(Params {
        x,
        delta: req.delta,
        m_exp: req.m_exp,
        k: req.k,
        xi: req.xi,
        y,
        z,
        scales,
        degraded,
        warnings,
    })
}

/// Stage 1: a uniform residue for every active prime `p <= z`.
pub fn stage1_uniform(system: &SievingSystem, z: u64, seed: u64) -> ShiftVector {
    ShiftVector::random(system, 0, z, seed, "stage1")
}

fn member_by(system: &SievingSystem, shift: &ShiftVector, lo: u64, hi: u64, n: i64) -> Result<bool> {
    for (p, rs) in system.active(lo, hi) {
        let b = shift
            .get(p)
            .ok_or_else(|| domain!("shift has no residue for prime {p}"))?;
        let r = (n - b as i64).rem_euclid(p as i64) as u64;
        if rs.binary_search(&r).is_ok() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{n + qh : 1 <= h <= J} ∩ S_1`, where `S_1` is sifted by the primes up
/// to `params.split(H)` using the stage-1 residues.
pub fn compute_ap(
    system: &SievingSystem,
    stage1: &ShiftVector,
    params: &Params,
    h: f64,
    q: u64,
    n: i64,
    j: u64,
) -> Result<Vec<i64>> {
    let cap = params.split(h);
    let mut out = Vec::new();
    for t in 1..=j as i64 {
        let a = n + q as i64 * t;
        if member_by(system, stage1, 0, cap, a)? {
            out.push(a);
        }
    }
    Ok(out)
}

/// `lambda(H; q, n)`: `sigma_2^{-|AP|}` if `AP(KH; q, n) ⊆ S_2`, else 0,
/// where `S_2` is sifted by the primes in `(H^M, z]`.
pub fn weight_lambda(
    system: &SievingSystem,
    stage1: &ShiftVector,
    params: &Params,
    h: f64,
    q: u64,
    n: i64,
) -> Result<f64> {
    let cap = params.split(h);
    let ap = compute_ap(system, stage1, params, h, q, n, params.ap_len(h))?;
    for &a in &ap {
        if !member_by(system, stage1, cap, params.z, a)? {
            return Ok(0.0);
        }
    }
    let sigma2 = system.sigma(cap, params.z)?;
    Ok(sigma2.powi(-(ap.len() as i32)))
}

/// Values of `lambda(H; q, n)` for `n` in `(-Ky, y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub h: f64,
    pub q: u64,
    /// The first `n`, namely `-Ky + 1`.
    pub n_lo: i64,
    pub values: Vec<f64>,
    /// `|AP(KH; q, n)|` for each `n`.
    pub ap_sizes: Vec<u32>,
    pub total: f64,
    pub sigma2: f64,
}

impl WeightTable {
    /// `lambda` at `n`, zero outside the table.
    pub fn get(&self, n: i64) -> f64 {
        usize::try_from(n - self.n_lo)
            .ok()
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(0.0)
    }

    /// Draw `n` with probability `lambda / total`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<i64> {
        if !(self.total > 0.0) {
            return None;
        }
        let u = rng.gen::<f64>() * self.total;
        let mut acc = 0.0;
        let mut last = None;
        for (i, &v) in self.values.iter().enumerate() {
            if v > 0.0 {
                acc += v;
                last = Some(i);
                if u < acc {
                    return Some(self.n_lo + i as i64);
                }
            }
        }
        last.map(|i| self.n_lo + i as i64)
    }
}

/// Build the weight table for `(H, q)` with two sifted windows and prefix
/// sums along each residue class mod `q`.
pub fn weight_table(
    system: &SievingSystem,
    stage1: &ShiftVector,
    params: &Params,
    h: f64,
    q: u64,
) -> Result<WeightTable> {
    let y = params.y as i64;
    let kk = params.k as i64;
    let j = params.ap_len(h) as i64;
    let qi = q as i64;
    let lo = -kk * y + 1;
    let hi = y + qi * j;
    let cap = params.split(h);
    let s1 = sift(system, cap, &stage1.restrict(0, cap), lo, hi, 0)?;
    let s2 = sift(system, params.z, stage1, lo, hi, cap)?;
    let sigma2 = system.sigma(cap, params.z)?;
    let len = (hi - lo + 1) as usize;
    let mut cnt = vec![0u32; len];
    let mut bad = vec![0u32; len];
    for i in 0..len {
        let n = lo + i as i64;
        let a = s1.contains(n);
        let (pc, pb) = if i >= q as usize {
            (cnt[i - q as usize], bad[i - q as usize])
        } else {
            (0, 0)
        };
        cnt[i] = pc + u32::from(a);
        bad[i] = pb + u32::from(a && !s2.contains(n));
    }
    let count = (y - lo + 1) as usize;
    let step = (qi * j) as usize;
    let ln_s2 = sigma2.ln();
    let mut values = Vec::with_capacity(count);
    let mut ap_sizes = Vec::with_capacity(count);
    for i in 0..count {
        let c = cnt[i + step] - cnt[i];
        let b = bad[i + step] - bad[i];
        ap_sizes.push(c);
        values.push(if b > 0 { 0.0 } else { (-(c as f64) * ln_s2).exp() });
    }
    let total = values.iter().sum();
    Ok(WeightTable {
        h,
        q,
        n_lo: lo,
        values,
        ap_sizes,
        total,
        sigma2,
    })
}

/// How stage 2 chooses `n_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Stage2Mode {
    /// Independent draws with probability `lambda / total`.
    Sample,
    /// Coordinated choice through the covering procedure.
    Cover { eta: f64 },
}

/// Summary of a cover-mode stage 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSummary {
    pub vertices: usize,
    pub edges: usize,
    pub c2: f64,
    pub rounds: usize,
    pub beta: f64,
    pub plan_scaled: bool,
    pub uncovered_fraction: f64,
}

/// Result of stage 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage2Outcome {
    pub choices: BTreeMap<u64, i64>,
    /// Primes whose weight total is zero.
    pub rejected: Vec<u64>,
    pub cover: Option<CoverSummary>,
}

/// Stage 2 on a normalized system.
pub fn stage2_select(
    system: &SievingSystem,
    params: &Params,
    stage1: &ShiftVector,
    seed: u64,
    mode: Stage2Mode,
) -> Result<Stage2Outcome> {
    let tables: Vec<WeightTable> = params
        .stage2_primes()
        .par_iter()
        .map(|&(h, q)| weight_table(system, stage1, params, h, q))
        .collect::<Result<_>>()?;
    let mut rejected = Vec::new();
    let mut live = Vec::new();
    for t in tables {
        if t.total > 0.0 {
            live.push(t);
        } else {
            rejected.push(t.q);
        }
    }
    let draw = |t: &WeightTable| {
        t.sample(&mut rng::stream(seed, "stage2", t.q))
            .expect("positive total")
    };
    let mut choices = BTreeMap::new();
    let mut summary = None;
    match mode {
        Stage2Mode::Sample => {
            for t in &live {
                choices.insert(t.q, draw(t));
            }
        }
        Stage2Mode::Cover { eta } => {
            let (inst, starts) = cover_instance(system, params, stage1, &live)?;
            let deg = inst.degrees(None);
            let c2 = if deg.is_empty() {
                0.0
            } else {
                deg.iter().sum::<f64>() / deg.len() as f64
            };
            let plan = if c2 > 0.0 {
                RoundPlan::fitted(eta, params.delta, c2).ok()
            } else {
                None
            };
            let parts = plan
                .as_ref()
                .map(|p| {
                    cover::assign_indices(inst.n_edges(), p, seed, 10)
                        .unwrap_or_else(|_| cover::assign_indices_once(inst.n_edges(), p, seed, 0))
                });
            let run = parts.as_ref().map(|pt| cover::run_cover(&inst, pt, seed));
            for (i, t) in live.iter().enumerate() {
                let n = match run.as_ref().and_then(|r| r.chosen[i]) {
                    Some(k) => starts[i][k],
                    None => draw(t),
                };
                choices.insert(t.q, n);
            }
            summary = Some(CoverSummary {
                vertices: inst.n_vertices(),
                edges: inst.n_edges(),
                c2,
                rounds: plan.as_ref().map_or(0, |p| p.m),
                beta: plan.as_ref().map_or(0.0, |p| p.beta),
                plan_scaled: plan.as_ref().is_some_and(|p| p.scaled),
                uncovered_fraction: run.as_ref().map_or(1.0, |r| r.uncovered_fraction),
            });
        }
    }
    Ok(Stage2Outcome {
        choices,
        rejected,
        cover: summary,
    })
}

/// Covering instance for stage 2: vertices are the stage-1 survivors in
/// `[1, y]`; edge `q` is `{n_q + qh : h <= KH}` restricted to them, with
/// `n_q` distributed as `lambda / total`.
fn cover_instance(
    system: &SievingSystem,
    params: &Params,
    stage1: &ShiftVector,
    tables: &[WeightTable],
) -> Result<(CoverInstance, Vec<Vec<i64>>)> {
    let y = params.y as i64;
    let w = sift(system, params.z, stage1, 1, y.max(1), 0)?;
    let index: BTreeMap<i64, u32> = w
        .members()
        .enumerate()
        .map(|(i, n)| (n, i as u32))
        .collect();
    let mut edges = Vec::with_capacity(tables.len());
    let mut starts = Vec::with_capacity(tables.len());
    for t in tables {
        let j = params.ap_len(t.h) as i64;
        let mut outcomes = Vec::new();
        let mut ns = Vec::new();
        for (i, &v) in t.values.iter().enumerate() {
            if v > 0.0 {
                let n = t.n_lo + i as i64;
                let vs = (1..=j)
                    .filter_map(|k| index.get(&(n + t.q as i64 * k)).copied())
                    .collect();
                outcomes.push((v / t.total, vs));
                ns.push(n);
            }
        }
        edges.push(EdgeDist { outcomes });
        starts.push(ns);
    }
    Ok((CoverInstance::new(index.len(), edges)?, starts))
}

/// Result of the clean-up stage, in normalized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanupOutcome {
    pub shift: ShiftVector,
    /// `|(S_{x/2} + b) ∩ [1, target]|`.
    pub survivors_in_target: usize,
    /// Active primes in `(x/2, x]`.
    pub available: usize,
    /// Survivors matched with a prime (the first `available` survivors).
    pub matched: usize,
    pub target_reached: bool,
}

/// Match survivors of `S_{x/2} + b`, in increasing order from 1, with the
/// active primes of `(x/2, x]` in increasing order, setting `b ≡ m (mod q)`.
/// Matching continues past `target` while primes remain; unused primes get
/// uniform residues.
fn cleanup_matching(
    system: &SievingSystem,
    x: u64,
    partial: &ShiftVector,
    target: u64,
    seed: u64,
) -> Result<CleanupOutcome> {
    let half = x / 2;
    let big: Vec<u64> = system.active(half, x).into_iter().map(|(q, _)| q).collect();
    let base = partial.restrict(0, half);
    let block = (4 * target.max(x)).max(4096) as i64;
    let mut survivors = Vec::new();
    let mut in_target = 0usize;
    let mut lo = 1i64;
    while survivors.len() <= big.len() || lo <= target as i64 {
        if lo > 1i64 << 40 {
            return Err(domain!("survivor scan did not terminate"));
        }
        let w = sift(system, half, &base, lo, lo + block - 1, 0)?;
        for m in w.members() {
            if m <= target as i64 {
                in_target += 1;
            }
            if survivors.len() <= big.len() {
                survivors.push(m);
            }
        }
        lo += block;
    }
    let mut shift = base;
    for (&q, &m) in big.iter().zip(&survivors) {
        shift.set(q, m.rem_euclid(q as i64) as u64);
    }
    shift.fill_random(system, half, x, seed, "stage3");
    let matched = big.len().min(survivors.len());
    Ok(CleanupOutcome {
        shift,
        survivors_in_target: in_target,
        available: big.len(),
        matched,
        target_reached: in_target <= big.len(),
    })
}

/// Stage 3 on a normalized system. Fails when the survivors in
/// `[1, target]` outnumber the primes of `(x/2, x]`.
pub fn stage3_cleanup(
    system: &SievingSystem,
    x: u64,
    partial: &ShiftVector,
    target: u64,
    seed: u64,
) -> Result<CleanupOutcome> {
    let out = cleanup_matching(system, x, partial, target, seed)?;
    if !out.target_reached {
        return Err(Error::CleanupFailed {
            survivors: out.survivors_in_target,
            available: out.available,
        });
    }
    Ok(out)
}

/// Survivor counts in `[1, y]` after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub stage1: u64,
    pub stage2: u64,
    pub stage3: u64,
}

/// Result of [`construct`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    /// Length of the certified run `[1, L]` outside `S_x + b`.
    pub length: u64,
    /// The shift, for the caller's (non-normalized) system.
    pub shift: ShiftVector,
    pub target: u64,
    pub target_reached: bool,
    pub rejected_q: Vec<u64>,
    pub survivors_by_stage: StageCounts,
    pub cover: Option<CoverSummary>,
}

/// Length of the run `[1, L]` outside `S_x + b`, certified by
/// [`verify_empty`] on the original system.
fn certify(
    original: &SievingSystem,
    normalized: &SievingSystem,
    x: u64,
    shift_norm: &ShiftVector,
) -> Result<(u64, ShiftVector)> {
    let first = first_member_from(normalized, x, shift_norm, 1, 1 << 16, 1 << 40)?
        .ok_or_else(|| domain!("no member of the sifted set found"))?;
    let length = (first - 1) as u64;
    let shift = shift_norm.denormalize(original)?;
    if !verify_empty(original, x, &shift, 1, length as i64)? {
        return Err(domain!("certificate failed for [1, {length}]"));
    }
    if verify_empty(original, x, &shift, length as i64 + 1, length as i64 + 1)? {
        return Err(domain!("run [1, {length}] is not maximal"));
    }
    Ok((length, shift))
}

fn count(system: &SievingSystem, x: u64, shift: &ShiftVector, y: u64) -> Result<u64> {
    if y == 0 {
        return Ok(0);
    }
    Ok(sift(system, x, shift, 1, y as i64, 0)?.count())
}

/// Run all three stages.
pub fn construct(
    system: &SievingSystem,
    params: &Params,
    mode: Stage2Mode,
    seed: u64,
) -> Result<Construction> {
    let x = params.x;
    let norm = system.normalize_shift();
    norm.check_nondegenerate(0, x)?;
    let z = params.z.min(x / 2);
    let s1 = stage1_uniform(&norm, z, seed);
    let after1 = count(&norm, z, &s1, params.y)?;
    let st2 = if params.degraded {
        Stage2Outcome {
            choices: BTreeMap::new(),
            rejected: Vec::new(),
            cover: None,
        }
    } else {
        stage2_select(&norm, params, &s1, seed, mode)?
    };
    let mut partial = s1;
    for (&q, &n) in &st2.choices {
        partial.set(q, n.rem_euclid(q as i64) as u64);
    }
    partial.fill_random(&norm, 0, x / 2, seed, "stage1");
    let after2 = count(&norm, x / 2, &partial, params.y)?;
    let clean = cleanup_matching(&norm, x, &partial, params.y, seed)?;
    let after3 = count(&norm, x, &clean.shift, params.y)?;
    let (length, shift) = certify(system, &norm, x, &clean.shift)?;
    Ok(Construction {
        length,
        shift,
        target: params.y,
        target_reached: clean.target_reached,
        rejected_q: st2.rejected,
        survivors_by_stage: StageCounts {
            stage1: after1,
            stage2: after2,
            stage3: after3,
        },
        cover: st2.cover,
    })
}

/// Result of [`trivial_baseline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub length: u64,
    pub shift: ShiftVector,
    /// Final target after shrinking.
    pub target: u64,
    pub shrink_steps: u32,
    pub target_reached: bool,
}

/// The trivial construction: uniform residues for `p <= x/2`, then the
/// clean-up stage. The target `[1, rho x / (8 C_1)]` uses the empirical
/// `rho` and `C_1 = sigma(x) (log x)^rho`, and is halved until the clean-up
/// clears it.
///
/// The residues for `p <= x/2` come from the same streams as stages 1 and 2
/// of [`construct`], so both runs differ only on the stage-2 primes.
pub fn trivial_baseline(system: &SievingSystem, x: u64, seed: u64) -> Result<Baseline> {
    let norm = system.normalize_shift();
    norm.check_nondegenerate(0, x)?;
    let partial = ShiftVector::random(&norm, 0, x / 2, seed, "stage1");
    let rho = norm.estimate_rho(x);
    let c1 = norm.sigma(1, x)? * (x as f64).ln().powf(rho);
    let mut target = if c1 > 0.0 {
        (rho * x as f64 / (8.0 * c1)).floor() as u64
    } else {
        x
    };
    let mut shrink_steps = 0;
    let mut clean = cleanup_matching(&norm, x, &partial, target, seed)?;
    while !clean.target_reached && target > 0 {
        target /= 2;
        shrink_steps += 1;
        clean = cleanup_matching(&norm, x, &partial, target, seed)?;
    }
    let (length, shift) = certify(system, &norm, x, &clean.shift)?;
    Ok(Baseline {
        length,
        shift,
        target,
        shrink_steps,
        target_reached: clean.target_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn era() -> SievingSystem {
        SievingSystem::eratosthenes()
    }

    fn desk(x: u64) -> ParamRequest {
        ParamRequest {
            x,
            delta: 0.25,
            m_exp: 1.5,
            k: 2,
            xi: 1.1,
            force_z: Some(x / 3),
            force_y: Some(x * 4 / 5),
            force_scales: None,
            all_q: false,
        }
    }

    #[test]
    fn derive_params_formulas() {
        let mut req = ParamRequest::defaults(&era(), 10_000);
        req.delta = 0.2;
        let p = derive_params(&era(), &req).unwrap();
        // (log 10^4)^0.2 = 1.559032..., so y = ceil(15590.32) = 15591.
        assert_eq!(p.y, 15_591);
        // 15591 * log(9.21034) / sqrt(9.21034) = 11406.52
        assert_eq!(p.z, 11_407);
        // 2y/x ≈ 3.12 exceeds y/(xi z) ≈ 1.24.
        assert!(p.scales.is_empty());
        assert!(p.degraded);
    }

    #[test]
    fn desk_params_have_scales() {
        let p = derive_params(&era(), &desk(100)).unwrap();
        assert_eq!((p.y, p.z), (80, 33));
        assert!(!p.degraded);
        for s in &p.scales {
            assert!(s.h >= 1.6 - 1e-12 && s.h <= 80.0 / (1.1 * 33.0) + 1e-12);
            for &q in &s.primes {
                assert!(q as f64 > 80.0 / (1.1 * s.h) && q as f64 <= 80.0 / s.h);
                assert!(q > p.z && 2 * q <= 100);
            }
        }
        assert!(p.warnings.iter().any(|w| w.contains("outside")));
    }

    #[test]
    fn derive_params_errors() {
        let mut r = desk(100);
        r.k = 1;
        assert!(derive_params(&era(), &r).is_err());
        let mut r = desk(100);
        r.delta = 0.7;
        assert!(derive_params(&era(), &r).is_err());
    }

    #[test]
    fn ap_examples() {
        let s = era().normalize_shift();
        let p = derive_params(&s, &desk(100)).unwrap();
        let b1 = stage1_uniform(&s, p.z, 4);
        assert!(compute_ap(&s, &b1, &p, 1.6, 47, 3, 0).unwrap().is_empty());
        // H^M >= 2, so S_1 removes one parity class.
        let ap = compute_ap(&s, &b1, &p, 1.6, 47, 3, 6).unwrap();
        let b2 = b1.get(2).unwrap() as i64;
        assert!(ap.iter().all(|a| (a - b2).rem_euclid(2) != 0));
        assert_eq!(ap.len(), 3);
        let empty = SievingSystem::table(BTreeMap::new()).unwrap();
        let ap = compute_ap(&empty, &ShiftVector::new(), &p, 1.6, 47, 3, 4).unwrap();
        assert_eq!(ap, vec![50, 97, 144, 191]);
    }

    #[test]
    fn table_matches_direct_definition() {
        let s = era().normalize_shift();
        for seed in 0..3 {
            let mut r = desk(60);
            r.force_z = Some(13);
            r.force_y = Some(48);
            r.all_q = true;
            let p = derive_params(&s, &r).unwrap();
            let b1 = stage1_uniform(&s, p.z, seed);
            for (h, q) in p.stage2_primes() {
                let t = weight_table(&s, &b1, &p, h, q).unwrap();
                for n in -(p.k as i64) * p.y as i64 + 1..=p.y as i64 {
                    let want = weight_lambda(&s, &b1, &p, h, q, n).unwrap();
                    assert!((t.get(n) - want).abs() <= 1e-12 * want.max(1.0), "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let s = era().normalize_shift();
        let p = derive_params(&s, &desk(100)).unwrap();
        let b1 = stage1_uniform(&s, p.z, 1);
        let (h, q) = p.stage2_primes()[0];
        let t = weight_table(&s, &b1, &p, h, q).unwrap();
        let sigma2 = s.sigma(p.split(h), p.z).unwrap();
        for (i, &v) in t.values.iter().enumerate() {
            if v > 0.0 {
                let want = sigma2.powi(-(t.ap_sizes[i] as i32));
                assert!((v - want).abs() < 1e-12 * want);
            }
        }
        assert!(t.values.contains(&0.0));
    }

    #[test]
    fn point_mass_selection() {
        let t = WeightTable {
            h: 1.0,
            q: 7,
            n_lo: -5,
            values: vec![0.0, 0.0, 2.5, 0.0],
            ap_sizes: vec![0; 4],
            total: 2.5,
            sigma2: 1.0,
        };
        for s in 0..20 {
            assert_eq!(t.sample(&mut rng::stream(s, "t", 0)), Some(-3));
        }
    }

    #[test]
    fn stage1_is_uniform_for_p2() {
        let s = era();
        let ones = (0..10_000)
            .filter(|&seed| stage1_uniform(&s, 2, seed).get(2) == Some(1))
            .count();
        assert!((ones as f64 / 10_000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn cleanup_examples() {
        let s = era().normalize_shift();
        let partial = ShiftVector::random(&s, 0, 50, 3, "stage1");
        let out = stage3_cleanup(&s, 100, &partial, 0, 3).unwrap();
        assert_eq!(out.survivors_in_target, 0);
        assert_eq!(out.shift.len(), 25);
        let w = sift(&s, 50, &partial, 1, 1000, 0).unwrap();
        let m = w.members().next().unwrap();
        let out = stage3_cleanup(&s, 100, &partial, m as u64, 3).unwrap();
        assert_eq!(out.shift.get(53), Some(m as u64 % 53));
        assert!(!sift(&s, 100, &out.shift, m, m, 0).unwrap().contains(m));
        // Ten primes in (50, 100]; the eleventh survivor cannot be matched.
        let eleventh = w.members().nth(10).unwrap();
        match stage3_cleanup(&s, 100, &partial, eleventh as u64, 3) {
            Err(Error::CleanupFailed { survivors, available }) => {
                assert_eq!((survivors, available), (11, 10));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn construct_certifies_and_is_reproducible() {
        let s = era();
        let p = derive_params(&s, &desk(100)).unwrap();
        for seed in 0..5 {
            let c = construct(&s, &p, Stage2Mode::Sample, seed).unwrap();
            assert!(verify_empty(&s, 100, &c.shift, 1, c.length as i64).unwrap());
            assert!(c.survivors_by_stage.stage2 <= c.survivors_by_stage.stage1);
            assert_eq!(c, construct(&s, &p, Stage2Mode::Sample, seed).unwrap());
            let b = trivial_baseline(&s, 100, seed).unwrap();
            assert!(verify_empty(&s, 100, &b.shift, 1, b.length as i64).unwrap());
            let cv = construct(&s, &p, Stage2Mode::Cover { eta: 0.05 }, seed).unwrap();
            assert!(verify_empty(&s, 100, &cv.shift, 1, cv.length as i64).unwrap());
        }
    }

    #[test]
    fn degraded_mode_equals_baseline() {
        let s = era();
        let mut r = desk(100);
        r.force_scales = Some(vec![]);
        let p = derive_params(&s, &r).unwrap();
        assert!(p.degraded);
        for seed in 0..5 {
            let c = construct(&s, &p, Stage2Mode::Sample, seed).unwrap();
            let b = trivial_baseline(&s, 100, seed).unwrap();
            assert_eq!(c.length, b.length);
            assert_eq!(c.shift, b.shift);
        }
    }

    #[test]
    fn non_normalized_system_certifies() {
        let s = SievingSystem::polynomial("n^2+1".parse().unwrap());
        let p = derive_params(&s, &desk(200)).unwrap();
        let c = construct(&s, &p, Stage2Mode::Sample, 2).unwrap();
        assert!(c.length > 0);
        assert!(verify_empty(&s, 200, &c.shift, 1, c.length as i64).unwrap());
    }
}
