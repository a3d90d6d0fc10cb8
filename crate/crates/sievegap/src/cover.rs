//! Random hypergraph covering.
//!
//! A [`CoverInstance`] is a vertex set `0..n` with a family of independent
//! random edges, each given by an explicit finite outcome distribution. The
//! module checks the sparsity hypotheses of the covering argument, plans the
//! rounds of the semi-random scheme, evaluates the `P_j(v)` recursion, and
//! runs a round-by-round selection whose uncovered set can be measured.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng;

/// Distribution of one random edge: outcomes with their probabilities. The
/// missing mass `1 - sum p` is the empty edge.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EdgeDist {
    pub outcomes: Vec<(f64, Vec<u32>)>,
}

impl EdgeDist {
    /// Total probability of a nonempty outcome.
    pub fn mass(&self) -> f64 {
        self.outcomes.iter().map(|o| o.0).sum()
    }

    /// Draw an outcome index, `None` for the empty edge.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, (p, _)) in self.outcomes.iter().enumerate() {
            acc += p;
            if u < acc {
                return Some(k);
            }
        }
        None
    }
}

/// Vertices `0..n_vertices` and independent random edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverInstance {
    n_vertices: usize,
    edges: Vec<EdgeDist>,
}

impl CoverInstance {
    /// Validate and build. Probabilities must be nonnegative with total at
    /// most 1 per edge, and outcomes must be sets of valid vertices.
    pub fn new(n_vertices: usize, mut edges: Vec<EdgeDist>) -> Result<Self> {
        for (i, e) in edges.iter_mut().enumerate() {
            let mut mass = 0.0;
            for (p, vs) in e.outcomes.iter_mut() {
                if !(*p >= 0.0) {
                    return Err(domain!("edge {i} has a negative probability"));
                }
                mass += *p;
                vs.sort_unstable();
                vs.dedup();
                if let Some(v) = vs.iter().find(|&&v| v as usize >= n_vertices) {
                    return Err(domain!("edge {i} mentions vertex {v} outside V"));
                }
            }
            if mass > 1.0 + 1e-9 {
                return Err(domain!("edge {i} has total probability {mass} > 1"));
            }
        }
        Ok(CoverInstance { n_vertices, edges })
    }

    /// `|V|`.
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Number of edge indices `s`.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// The edge distributions.
    pub fn edges(&self) -> &[EdgeDist] {
        &self.edges
    }

    /// The size parameter of the hypotheses: `max(|V|, s)`.
    pub fn y(&self) -> f64 {
        self.n_vertices.max(self.edges.len()).max(3) as f64
    }

    /// `sum_{i in idx} Pr(v in e_i)` for every vertex, over a subset of
    /// indices (all indices when `idx` is `None`).
    pub fn degrees(&self, idx: Option<&[usize]>) -> Vec<f64> {
        let mut d = vec![0.0; self.n_vertices];
        let mut add = |e: &EdgeDist| {
            for (p, vs) in &e.outcomes {
                for &v in vs {
                    d[v as usize] += p;
                }
            }
        };
        match idx {
            Some(ix) => ix.iter().for_each(|&i| add(&self.edges[i])),
            None => self.edges.iter().for_each(&mut add),
        }
        d
    }

    /// Largest `Pr(v in e_i)` with its vertex and edge.
    pub fn max_inclusion(&self) -> (f64, u32, usize) {
        let mut best = (0.0, 0, 0);
        let mut acc = vec![0.0f64; self.n_vertices];
        let mut touched: Vec<u32> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for (p, vs) in &e.outcomes {
                for &v in vs {
                    if acc[v as usize] == 0.0 {
                        touched.push(v);
                    }
                    acc[v as usize] += p;
                }
            }
            for v in touched.drain(..) {
                let p = std::mem::take(&mut acc[v as usize]);
                if p > best.0 || (p == best.0 && (i, v) < (best.2, best.1)) {
                    best = (p, v, i);
                }
            }
        }
        best
    }

    /// Largest codegree `sum_i Pr(u, v in e_i)` over pairs `u < v`.
    pub fn max_codegree(&self) -> (f64, (u32, u32)) {
        let mut co: HashMap<(u32, u32), f64> = HashMap::new();
        for e in &self.edges {
            for (p, vs) in &e.outcomes {
                for (a, &u) in vs.iter().enumerate() {
                    for &v in &vs[a + 1..] {
                        *co.entry((u, v)).or_default() += p;
                    }
                }
            }
        }
        co.into_iter()
            .fold((0.0, (0, 0)), |best, (k, p)| {
                if p > best.0 || (p == best.0 && k < best.1) {
                    (p, k)
                } else {
                    best
                }
            })
    }

    /// Largest possible edge size.
    pub fn max_edge_size(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|e| e.outcomes.iter().filter(|o| o.0 > 0.0).map(|o| o.1.len()))
            .max()
            .unwrap_or(0)
    }
}

/// One hypothesis of the covering argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub worst: String,
}

/// Outcome of [`check_hypotheses`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub y: f64,
    pub c2: f64,
    pub eta: f64,
    pub delta: f64,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// Check the covering argument's hypotheses with `y = max(|V|, s)`:
/// edge size at most `(log y)^{1/2} / log log y`, inclusion probabilities at
/// most `y^{-1/2-1/100}`, codegrees at most `y^{-1/2}`, degrees within `eta`
/// of `c2`, and `10^{2 delta} <= c2 <= 100`.
pub fn check_hypotheses(inst: &CoverInstance, delta: f64, c2: f64, eta: f64) -> HypothesisReport {
    let y = inst.y();
    let size_cap = y.ln().sqrt() / y.ln().ln();
    let size = inst.max_edge_size() as f64;
    let (incl, iv, ie) = inst.max_inclusion();
    let incl_cap = y.powf(-0.5 - 0.01);
    let (co, (cu, cv)) = inst.max_codegree();
    let co_cap = y.powf(-0.5);
    let deg = inst.degrees(None);
    let (dev, dv) = deg
        .iter()
        .enumerate()
        .map(|(v, d)| ((d - c2).abs(), v))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let lo = 10f64.powf(2.0 * delta);
    let checks = vec![
        Check {
            name: "edge_size".into(),
            value: size,
            bound: size_cap,
            pass: size <= size_cap,
            worst: String::new(),
        },
        Check {
            name: "sparsity".into(),
            value: incl,
            bound: incl_cap,
            pass: incl <= incl_cap,
            worst: format!("vertex {iv} in edge {ie}"),
        },
        Check {
            name: "codegree".into(),
            value: co,
            bound: co_cap,
            pass: co <= co_cap,
            worst: format!("vertices {cu} and {cv}"),
        },
        Check {
            name: "degree".into(),
            value: dev,
            bound: eta,
            pass: dev <= eta,
            worst: format!("vertex {dv}"),
        },
        Check {
            name: "c2_range".into(),
            value: c2,
            bound: lo,
            pass: (lo..=100.0).contains(&c2),
            worst: String::new(),
        },
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    HypothesisReport {
        y,
        c2,
        eta,
        delta,
        checks,
        all_pass,
    }
}

/// Round schedule of the semi-random covering scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundPlan {
    pub beta: f64,
    pub m: usize,
    pub c2: f64,
    pub eta: f64,
    /// Disjoint subintervals `[a_j, b_j)` of `[0, 1]`, `j = 1..m`.
    pub intervals: Vec<(f64, f64)>,
    /// True when the intervals were scaled down to fit in `[0, 1]`.
    pub scaled: bool,
}

fn beta_admissible(beta: f64, delta: f64) -> bool {
    let t = 10f64.powf(2.0 * delta);
    beta > t && t > beta * beta.ln() / (beta - 1.0)
}

/// First admissible `beta` of the form `10^{2 delta} + k h` (`k >= 1`) for
/// the step `h = 1/10`. Small `delta` leaves no admissible point on that
/// grid, and then the step is divided by 10 until one appears.
pub fn admissible_beta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(domain!("delta must lie in (0, 1/2), got {delta}"));
    }
    let t = 10f64.powf(2.0 * delta);
    (1..=8)
        .map(|e| 10f64.powi(-e))
        .find_map(|step| {
            (1..=100_000)
                .map(|k| t + k as f64 * step)
                .find(|&b| beta_admissible(b, delta))
        })
        .ok_or_else(|| domain!("no admissible beta for delta = {delta}"))
}

/// Plan rounds for error target `eta` with `beta` from [`admissible_beta`],
/// so that `beta > 10^{2 delta} > beta log beta / (beta - 1)`.
pub fn plan_rounds(eta: f64, delta: f64, c2: f64) -> Result<RoundPlan> {
    plan_rounds_with_beta(eta, admissible_beta(delta)?, delta, c2)
}

/// Plan rounds for a given `beta`, which must satisfy the admissibility
/// inequalities for `delta`. Fails when the intervals do not fit in `[0, 1]`.
pub fn plan_rounds_with_beta(eta: f64, beta: f64, delta: f64, c2: f64) -> Result<RoundPlan> {
    if !(eta > 0.0) {
        return Err(domain!("eta must be positive, got {eta}"));
    }
    if !(c2 > 0.0) {
        return Err(domain!("C2 must be positive, got {c2}"));
    }
    if !beta_admissible(beta, delta) {
        return Err(domain!("beta = {beta} is not admissible for delta = {delta}"));
    }
    let m = ((1.0 / eta).ln() / beta.ln()).ceil().max(1.0) as usize;
    let mut intervals = Vec::with_capacity(m);
    let mut a = 0.0;
    for j in 1..=m {
        let len = beta.powi(1 - j as i32) * beta.ln() / c2;
        intervals.push((a, a + len));
        a += len;
    }
    if a > 1.0 + 1e-12 {
        return Err(domain!(
            "interval lengths sum to {a} > 1; C2 = {c2} is too small for beta = {beta}"
        ));
    }
    Ok(RoundPlan {
        beta,
        m,
        c2,
        eta,
        intervals,
        scaled: false,
    })
}

impl RoundPlan {
    /// Total length of the intervals.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Like [`plan_rounds`], but when the intervals would overflow `[0, 1]`
    /// they are scaled by a common factor so that they exactly fill it.
    pub fn fitted(eta: f64, delta: f64, c2: f64) -> Result<RoundPlan> {
        match plan_rounds(eta, delta, c2) {
            Ok(p) => Ok(p),
            Err(_) if c2 > 0.0 => {
                // Plan with a C2 large enough to fit, then stretch back.
                let beta = admissible_beta(delta)?;
                let m = ((1.0 / eta).ln() / beta.ln()).ceil().max(1.0) as usize;
                let total: f64 = (1..=m)
                    .map(|j| beta.powi(1 - j as i32) * beta.ln() / c2)
                    .sum();
                let mut p = plan_rounds_with_beta(eta, beta, delta, c2 * total)?;
                p.c2 = c2;
                p.scaled = true;
                Ok(p)
            }
            Err(e) => Err(e),
        }
    }
}

/// Give each index `i < s` a uniform `t_i` and return `I_j = {i : t_i in
/// interval j}`. Indices outside every interval are unused. Resamples (with
/// fresh streams) up to `retries` times if some `I_j` is empty.
pub fn assign_indices(s: usize, plan: &RoundPlan, seed: u64, retries: usize) -> Result<Vec<Vec<usize>>> {
    for attempt in 0..=retries as u64 {
        let parts = assign_indices_once(s, plan, seed, attempt);
        if parts.iter().all(|p| !p.is_empty()) {
            return Ok(parts);
        }
    }
    Err(domain!("some round received no index after {retries} retries"))
}

/// One draw of the partition of [`assign_indices`], where rounds may be
/// empty. An empty round leaves every `P_j(v)` unchanged.
pub fn assign_indices_once(s: usize, plan: &RoundPlan, seed: u64, attempt: u64) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); plan.m];
    for i in 0..s {
        let t: f64 = rng::stream(seed, "cover-t", (attempt << 40) | i as u64).gen();
        if let Some(j) = plan.intervals.iter().position(|&(a, b)| a <= t && t < b) {
            parts[j].push(i);
        }
    }
    parts
}

/// Round degrees `d_{I_j}(v)` and the recursion
/// `P_0 = 1`, `P_j(v) = P_{j-1}(v) exp(-d_{I_j}(v) / P_{j-1}(v))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// `d[j][v]` for rounds `j = 0..m` (round `j + 1` in one-based terms).
    pub d: Vec<Vec<f64>>,
    /// `p[j][v]` for `j = 0..=m`.
    pub p: Vec<Vec<f64>>,
    /// `min_v P_m(v)`.
    pub kappa: f64,
}

/// Evaluate round degrees and the `P_j` recursion.
pub fn degree_profile(inst: &CoverInstance, partition: &[Vec<usize>]) -> DegreeProfile {
    let d: Vec<Vec<f64>> = partition.iter().map(|ix| inst.degrees(Some(ix))).collect();
    let mut p = vec![vec![1.0; inst.n_vertices()]];
    for dj in &d {
        let prev = p.last().expect("nonempty");
        let next = prev
            .iter()
            .zip(dj)
            .map(|(&pv, &dv)| pv * (-dv / pv).exp())
            .collect();
        p.push(next);
    }
    let kappa = p
        .last()
        .expect("nonempty")
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    DegreeProfile { d, p, kappa }
}

/// Outcome of [`run_cover`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRun {
    /// Chosen outcome index per edge, `None` for `e'_i = ∅`.
    pub chosen: Vec<Option<usize>>,
    /// Vertices covered by no chosen edge.
    pub uncovered: Vec<u32>,
    /// `|uncovered| / |V|`.
    pub uncovered_fraction: f64,
}

/// Run the rounds of the semi-random scheme.
///
/// In round `j` every index `i in I_j` picks outcome `e` with weight
/// `Pr(e_i = e) / prod_{v in e} P_{j-1}(v)` if `e` lies inside the set of
/// vertices alive at the start of the round, and weight 0 otherwise. The
/// empty edge takes the remaining weight `max(0, 1 - Z_i)`; when the total
/// `Z_i` exceeds 1 the weights are normalized. Choices within a round use
/// the same alive set and independent streams, so they can be made in
/// parallel.
pub fn run_cover(inst: &CoverInstance, partition: &[Vec<usize>], seed: u64) -> CoverRun {
    let prof = degree_profile(inst, partition);
    let mut alive = vec![true; inst.n_vertices()];
    let mut chosen = vec![None; inst.n_edges()];
    for (j, ix) in partition.iter().enumerate() {
        let pj = &prof.p[j];
        let picks: Vec<(usize, Option<usize>)> = ix
            .par_iter()
            .map(|&i| {
                let e = &inst.edges[i];
                let w: Vec<f64> = e
                    .outcomes
                    .iter()
                    .map(|(p, vs)| {
                        if vs.iter().all(|&v| alive[v as usize]) {
                            p / vs.iter().map(|&v| pj[v as usize]).product::<f64>()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let z: f64 = w.iter().sum();
                let u = rng::stream(seed, "cover-pick", i as u64).gen::<f64>() * z.max(1.0);
                let mut acc = 0.0;
                let mut pick = None;
                for (k, wk) in w.iter().enumerate() {
                    acc += wk;
                    if u < acc {
                        pick = Some(k);
                        break;
                    }
                }
                (i, pick)
            })
            .collect();
        for (i, pick) in picks {
            if let Some(k) = pick {
                for &v in &inst.edges[i].outcomes[k].1 {
                    alive[v as usize] = false;
                }
            }
            chosen[i] = pick;
        }
    }
    let uncovered: Vec<u32> = (0..inst.n_vertices() as u32)
        .filter(|&v| alive[v as usize])
        .collect();
    let uncovered_fraction = if inst.n_vertices() == 0 {
        0.0
    } else {
        uncovered.len() as f64 / inst.n_vertices() as f64
    };
    CoverRun {
        chosen,
        uncovered,
        uncovered_fraction,
    }
}

/// Synthetic family of arithmetic-progression edges.
///
/// Each of `groups = round(c2 * block / ap_len)` groups lists the vertices
/// `0..n` along a random progression `offset + diff * t (mod n)` with
/// `gcd(diff, n) = 1`, and cuts the list into blocks of `block` vertices.
/// Every block yields one edge: `ap_len` cyclically consecutive entries of
/// the block, starting at a uniform position. Each vertex then has degree
/// exactly `groups * ap_len / block`.
pub fn ap_family(n: usize, c2: f64, block: usize, ap_len: usize, seed: u64) -> Result<CoverInstance> {
    if block == 0 || !n.is_multiple_of(block) {
        return Err(domain!("block size {block} must divide n = {n}"));
    }
    if ap_len == 0 || ap_len > block {
        return Err(domain!("progression length must lie in 1..={block}"));
    }
    let groups = (c2 * block as f64 / ap_len as f64).round() as usize;
    let p = 1.0 / block as f64;
    let mut edges = Vec::with_capacity(groups * n / block);
    for g in 0..groups {
        let mut r = rng::stream(seed, "ap-family", g as u64);
        let diff = loop {
            let d = r.gen_range(1..n.max(2)) as u64;
            if num_integer::gcd(d, n as u64) == 1 {
                break d;
            }
        };
        let offset = r.gen_range(0..n) as u64;
        let order: Vec<u32> = (0..n as u64)
            .map(|t| ((offset + diff * t) % n as u64) as u32)
            .collect();
        for blk in order.chunks(block) {
            let outcomes = (0..block)
                .map(|s| (p, (0..ap_len).map(|k| blk[(s + k) % block]).collect()))
                .collect();
            edges.push(EdgeDist { outcomes });
        }
    }
    CoverInstance::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton_edges(n: usize, probs: &[(u32, f64)]) -> CoverInstance {
        let edges = probs
            .iter()
            .map(|&(v, p)| EdgeDist {
                outcomes: vec![(p, vec![v])],
            })
            .collect();
        CoverInstance::new(n, edges).unwrap()
    }

    #[test]
    fn plan_examples() {
        let p = plan_rounds_with_beta(0.01, 4.0, 0.25, 4.0).unwrap();
        assert_eq!(p.m, 4);
        let q = plan_rounds(0.01, 0.25, 4.0).unwrap();
        assert!((q.beta - (10f64.sqrt() + 0.1)).abs() < 1e-12);
        assert_eq!(q.m, 4);
        let single = plan_rounds(0.5, 0.25, 4.0).unwrap();
        assert_eq!(single.m, 1);
        let three = plan_rounds(0.05, 0.25, 4.0).unwrap();
        assert_eq!(three.m, 3);
    }

    #[test]
    fn beta_grid_refines_for_small_delta() {
        // The coarse grid is used whenever it has an admissible point.
        assert!((admissible_beta(0.25).unwrap() - (10f64.sqrt() + 0.1)).abs() < 1e-12);
        let delta = 0.007;
        let t = 10f64.powf(2.0 * delta);
        let beta = admissible_beta(delta).unwrap();
        assert!(beta > t && t > beta * beta.ln() / (beta - 1.0));
        assert!(beta - t < 0.1);
        assert!(plan_rounds(0.05, delta, 100.0).is_ok());
    }

    #[test]
    fn plan_interval_lengths() {
        let p = plan_rounds(0.01, 0.25, 4.0).unwrap();
        let b = p.beta;
        let want = (b.ln() / 4.0) * (1.0 - b.powi(-(p.m as i32))) / (1.0 - 1.0 / b);
        assert!((p.total_length() - want).abs() < 1e-12);
        assert!(p.total_length() <= 1.0);
        for w in p.intervals.windows(2) {
            assert!(w[0].1 <= w[1].0 + 1e-15);
        }
        let bm = b.powi(p.m as i32);
        assert!(bm >= 1.0 / p.eta && bm <= b / p.eta);
    }

    #[test]
    fn plan_errors_and_fitting() {
        assert!(plan_rounds_with_beta(0.01, 2.0, 0.25, 4.0).is_err());
        assert!(plan_rounds(0.01, 0.6, 4.0).is_err());
        assert!(plan_rounds(0.05, 0.25, 0.3).is_err());
        let f = RoundPlan::fitted(0.05, 0.25, 0.3).unwrap();
        assert!(f.scaled);
        assert!((f.total_length() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hypothesis_examples() {
        let inst = ap_family(10_000, 4.0, 250, 1, 1).unwrap();
        let rep = check_hypotheses(&inst, 0.25, 4.0, 0.05);
        assert!(rep.all_pass, "{rep:?}");
        let rep = check_hypotheses(&inst, 0.25, 1.0, 0.05);
        let c2 = rep.checks.iter().find(|c| c.name == "c2_range").unwrap();
        assert!(!c2.pass);
        assert!((c2.bound - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn planted_codegree_violation() {
        let mut edges = vec![
            EdgeDist {
                outcomes: vec![(0.5, vec![1, 2])],
            };
            3
        ];
        edges.push(EdgeDist {
            outcomes: vec![(0.1, vec![3])],
        });
        let inst = CoverInstance::new(100, edges).unwrap();
        let rep = check_hypotheses(&inst, 0.25, 4.0, 0.05);
        let co = rep.checks.iter().find(|c| c.name == "codegree").unwrap();
        assert!(!co.pass);
        assert_eq!(co.worst, "vertices 1 and 2");
        assert!((co.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ap_family_degrees_are_exact() {
        let inst = ap_family(1000, 4.0, 50, 3, 2).unwrap();
        for d in inst.degrees(None) {
            // 67 groups of progressions of length 3 in blocks of 50.
            assert!((d - 67.0 * 3.0 / 50.0).abs() < 1e-9);
        }
        assert_eq!(inst.max_edge_size(), 3);
    }

    #[test]
    fn profile_examples() {
        let inst = singleton_edges(3, &[]);
        let prof = degree_profile(&inst, &[vec![], vec![]]);
        assert!(prof.p.iter().flatten().all(|&p| p == 1.0));
        let b: f64 = 4.0;
        let inst = singleton_edges(1, &[(0, b.ln() / 2.0), (0, b.ln() / 2.0)]);
        let prof = degree_profile(&inst, &[vec![0, 1]]);
        assert!((prof.p[1][0] - 1.0 / b).abs() < 1e-12);
    }

    #[test]
    fn profile_tracks_geometric_decay() {
        let b: f64 = 4.0;
        let m: usize = 5;
        // Round j degree beta^{1-j} log beta, from many small edges.
        let mut probs = Vec::new();
        let mut parts = Vec::new();
        for j in 1..=m {
            let d = b.powi(1 - j as i32) * b.ln();
            let k = 100;
            let start = probs.len();
            probs.extend((0..k).map(|_| (0u32, d / k as f64)));
            parts.push((start..start + k).collect::<Vec<_>>());
        }
        let inst = singleton_edges(1, &probs);
        let prof = degree_profile(&inst, &parts);
        for j in 1..=m {
            let want = b.powi(-(j as i32));
            assert!((prof.p[j][0] / want - 1.0).abs() < 0.1, "j = {j}");
        }
        for j in 1..=m {
            assert!(prof.p[j][0] <= prof.p[j - 1][0]);
        }
    }

    #[test]
    fn full_edge_covers_everything() {
        let inst = CoverInstance::new(
            4,
            vec![EdgeDist {
                outcomes: vec![(1.0, vec![0, 1, 2, 3])],
            }],
        )
        .unwrap();
        let run = run_cover(&inst, &[vec![0]], 5);
        assert_eq!(run.chosen, vec![Some(0)]);
        assert!(run.uncovered.is_empty());
    }

    #[test]
    fn unreachable_vertex_stays_uncovered() {
        let inst = singleton_edges(3, &[(0, 1.0), (1, 1.0)]);
        let run = run_cover(&inst, &[vec![0, 1]], 1);
        assert_eq!(run.uncovered, vec![2]);
    }

    #[test]
    fn partition_sizes_concentrate() {
        let plan = RoundPlan {
            beta: 2.0,
            m: 2,
            c2: 1.0,
            eta: 0.25,
            intervals: vec![(0.0, 0.3), (0.3, 1.0)],
            scaled: false,
        };
        let s = 20_000;
        let parts = assign_indices(s, &plan, 3, 0).unwrap();
        for (part, len) in parts.iter().zip([0.3, 0.7]) {
            let want = s as f64 * len;
            assert!((part.len() as f64 - want).abs() <= 3.0 * (s as f64).sqrt());
        }
        assert_eq!(parts, assign_indices(s, &plan, 3, 0).unwrap());
        let one = assign_indices(1, &plan, 3, 0);
        assert!(one.is_err());
    }

    #[test]
    fn invalid_instances_are_rejected() {
        assert!(CoverInstance::new(2, vec![EdgeDist { outcomes: vec![(0.5, vec![2])] }]).is_err());
        assert!(CoverInstance::new(2, vec![EdgeDist { outcomes: vec![(0.7, vec![0]), (0.7, vec![1])] }]).is_err());
        assert!(ap_family(100, 4.0, 30, 1, 0).is_err());
    }
}
