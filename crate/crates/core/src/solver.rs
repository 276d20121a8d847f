//! Burning numbers: exact search, brute-force oracle, and certified bounds.
//!
//! Everything here rests on the covering characterization: `b(G) <= k` iff
//! balls of radii `k-1, k-2, …, 0` around some (not necessarily distinct)
//! centers cover `V`. A covering tuple turns into a strict burning schedule
//! of the same length through [`repair_schedule`].

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize, Serializer};

use crate::bitset::BitSet;
use crate::burn::{repair_schedule, simulate, BurnSchedule, Completion};
use crate::error::{invalid, Error, Result};
use crate::graph::{Bfs, Graph, Hops, UNREACHABLE};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 10;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

fn ser_ms<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub b: usize,
    pub witness: BurnSchedule,
    pub nodes_explored: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_ms")]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SolveOutcome {
    Solved(SolveResult),
    /// Node budget exhausted; `lower <= b(G) <= upper`.
    Unsolved { lower: usize, upper: usize, nodes_explored: u64 },
}

impl SolveOutcome {
    pub fn solved(self) -> Option<SolveResult> {
        match self {
            SolveOutcome::Solved(r) => Some(r),
            SolveOutcome::Unsolved { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    BallsumLower,
    EccentricityUpper,
    GreedyUpper,
    B2Characterization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// `maxima[j] = max_v |N(v, j)|` for `j < maxima.len()`; their sum is
    /// below `n`. `saturating` names a vertex whose next ball pushes the sum
    /// to at least `n`.
    BallSum {
        maxima: Vec<usize>,
        saturating: Option<(usize, usize)>,
    },
    Center { vertex: usize, eccentricity: usize },
    Schedule { sources: Vec<usize> },
    /// A vertex adjacent to all but at most one other vertex.
    NearUniversal { vertex: usize, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub value: usize,
    pub evidence: Evidence,
}

impl BoundCertificate {
    pub fn is_lower(&self) -> bool {
        self.kind == BoundKind::BallsumLower
    }

    /// Re-verify the evidence against `g` in polynomial time.
    pub fn recheck(&self, g: &Graph) -> Result<bool> {
        let n = g.n();
        Ok(match (&self.kind, &self.evidence) {
            (BoundKind::BallsumLower, Evidence::BallSum { maxima, saturating }) => {
                let mut bfs = Bfs::new(n);
                let mut sum = 0;
                for (j, &claimed) in maxima.iter().enumerate() {
                    let actual = (0..n).map(|v| bfs.ball_size(g, v, j)).max().unwrap_or(0);
                    if actual != claimed {
                        return Ok(false);
                    }
                    sum += actual;
                }
                let sat_ok = match saturating {
                    Some((v, size)) => *v < n && bfs.ball_size(g, *v, maxima.len()) == *size && sum + size >= n,
                    None => true,
                };
                sum < n && self.value == maxima.len() + 1 && sat_ok
            }
            (BoundKind::EccentricityUpper, Evidence::Center { vertex, eccentricity }) => {
                *vertex < n
                    && g.eccentricity(*vertex)? == Hops::Finite(*eccentricity as u32)
                    && self.value == eccentricity + 1
            }
            (BoundKind::GreedyUpper, Evidence::Schedule { sources }) => {
                sources.len() <= self.value
                    && matches!(
                        simulate(g, &BurnSchedule::strict(sources.clone()))?.completion,
                        Completion::Round(t) if t <= self.value
                    )
            }
            (BoundKind::B2Characterization, Evidence::NearUniversal { vertex, degree }) => {
                n >= 2 && *vertex < n && g.degree(*vertex) == *degree && degree + 2 >= n && self.value == 2
            }
            _ => false,
        })
    }
}

/// Exhaustive oracle: tries every ordered `k`-tuple of centers for
/// `k = 1, 2, …` and returns the first covering one.
pub fn burning_number_bruteforce(g: &Graph) -> Result<SolveResult> {
    burning_number_bruteforce_capped(g, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn burning_number_bruteforce_capped(g: &Graph, cap: usize) -> Result<SolveResult> {
    let n = g.n();
    if n > cap || n > 64 {
        return Err(Error::CapExceeded { cap: cap.min(64), n });
    }
    let start = Instant::now();
    let dist = g.distance_matrix();
    // masks[j][v] = bitmask of N(v, j)
    let masks: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|v| {
                    (0..n)
                        .filter(|&u| dist[v * n + u] != UNREACHABLE && dist[v * n + u] as usize <= j)
                        .fold(0u64, |m, u| m | (1 << u))
                })
                .collect()
        })
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    fn rec(masks: &[Vec<u64>], k: usize, i: usize, acc: u64, full: u64, tuple: &mut Vec<usize>, nodes: &mut u64) -> bool {
        *nodes += 1;
        if i == k {
            return acc == full;
        }
        let radius = k - 1 - i;
        for (v, &m) in masks[radius].iter().enumerate() {
            tuple.push(v);
            if rec(masks, k, i + 1, acc | m, full, tuple, nodes) {
                return true;
            }
            tuple.pop();
        }
        false
    }

    let mut nodes = 0;
    for k in 1..=n {
        let mut tuple = Vec::with_capacity(k);
        if rec(&masks, k, 0, 0, full, &mut tuple, &mut nodes) {
            let witness = repair_schedule(g, &tuple)?;
            return Ok(SolveResult {
                b: k,
                witness,
                nodes_explored: nodes,
                elapsed: start.elapsed(),
            });
        }
    }
    unreachable!("n balls always cover n vertices")
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

pub fn burning_number_exact(g: &Graph) -> SolveOutcome {
    burning_number_exact_with(g, SolverConfig::default())
}

/// Branch and bound over coverings.
///
/// `k` runs upward from the best lower bound. For each `k` the search
/// repeatedly takes the uncovered vertex whose ball under the largest free
/// radius is smallest, and branches on which free radius covers it and from
/// which center; centers whose new coverage is contained in another
/// candidate's are skipped. Branches die when the summed maximal ball sizes
/// of the free radii fall short of the uncovered count. The greedy schedule
/// supplies the upper end: if no `k` below it works, it is optimal.
pub fn burning_number_exact_with(g: &Graph, cfg: SolverConfig) -> SolveOutcome {
    let start = Instant::now();
    let lower = lower_bound_ballsum(g).value.max(g.components().len());
    let (greedy, greedy_cert) = greedy_schedule(g);
    let upper = greedy_cert.value;
    let mut search = CoverSearch::new(g, cfg.node_budget);
    for k in lower..upper {
        match search.feasible(k) {
            Ok(Some(centers)) => {
                let witness = repair_schedule(g, &centers).expect("centers are valid ids");
                return SolveOutcome::Solved(SolveResult {
                    b: k,
                    witness,
                    nodes_explored: search.nodes,
                    elapsed: start.elapsed(),
                });
            }
            Ok(None) => {}
            Err(BudgetExceeded) => {
                return SolveOutcome::Unsolved {
                    lower: k,
                    upper,
                    nodes_explored: search.nodes,
                }
            }
        }
    }
    SolveOutcome::Solved(SolveResult {
        b: upper,
        witness: greedy,
        nodes_explored: search.nodes,
        elapsed: start.elapsed(),
    })
}

struct BudgetExceeded;

struct CoverSearch {
    n: usize,
    dist: Vec<u32>,
    max_finite: usize,
    /// balls[j][c] = N(c, j), built lazily, clamped at the largest finite distance
    balls: Vec<Vec<BitSet>>,
    ball_sizes: Vec<Vec<usize>>,
    max_ball: Vec<usize>,
    budget: u64,
    nodes: u64,
}

impl CoverSearch {
    fn new(g: &Graph, budget: u64) -> Self {
        let n = g.n();
        let dist = g.distance_matrix();
        let max_finite = dist.iter().filter(|&&d| d != UNREACHABLE).max().copied().unwrap_or(0) as usize;
        Self {
            n,
            dist,
            max_finite,
            balls: Vec::new(),
            ball_sizes: Vec::new(),
            max_ball: Vec::new(),
            budget,
            nodes: 0,
        }
    }

    fn ensure_radius(&mut self, j: usize) {
        let n = self.n;
        while self.balls.len() <= j.min(self.max_finite) {
            let r = self.balls.len() as u32;
            let row: Vec<BitSet> = (0..n)
                .map(|c| {
                    let mut b = BitSet::new(n);
                    for (u, &d) in self.dist[c * n..(c + 1) * n].iter().enumerate() {
                        if d <= r {
                            b.insert(u);
                        }
                    }
                    b
                })
                .collect();
            let sizes: Vec<usize> = row.iter().map(BitSet::count).collect();
            self.max_ball.push(*sizes.iter().max().unwrap());
            self.ball_sizes.push(sizes);
            self.balls.push(row);
        }
    }

    #[inline]
    fn level(&self, j: usize) -> usize {
        j.min(self.max_finite)
    }

    fn feasible(&mut self, k: usize) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        if k == 0 {
            return Ok(None);
        }
        self.ensure_radius(k - 1);
        let mut free = vec![true; k];
        let mut centers = vec![None; k];
        let uncovered = BitSet::full(self.n);
        if self.descend(&uncovered, &mut free, &mut centers)? {
            // radius j is lit in round k - j; unused slots get a filler that
            // repair_schedule replaces if needed
            Ok(Some((0..k).map(|i| centers[k - 1 - i].unwrap_or(0)).collect()))
        } else {
            Ok(None)
        }
    }

    fn descend(&mut self, uncovered: &BitSet, free: &mut [bool], centers: &mut [Option<usize>]) -> Result<bool, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded);
        }
        let need = uncovered.count();
        if need == 0 {
            return Ok(true);
        }
        let capacity: usize = free
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(j, _)| self.max_ball[self.level(j)])
            .sum();
        if capacity < need {
            return Ok(false);
        }
        let Some(jmax) = free.iter().rposition(|&f| f) else {
            return Ok(false);
        };
        let sizes = &self.ball_sizes[self.level(jmax)];
        let u = uncovered.iter().min_by_key(|&v| (sizes[v], v)).expect("need > 0");
        let n = self.n;
        for j in (0..free.len()).rev() {
            if !free[j] {
                continue;
            }
            let lvl = self.level(j);
            let row = &self.dist[u * n..(u + 1) * n];
            let mut cands: Vec<(usize, usize)> = row
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != UNREACHABLE && d as usize <= j)
                .map(|(c, _)| (c, self.balls[lvl][c].intersection_count(uncovered)))
                .collect();
            cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let balls = &self.balls[lvl];
            let mut kept: Vec<usize> = Vec::with_capacity(cands.len());
            for &(c, _) in &cands {
                // kept entries have gain >= this one; equal sets resolve to the smaller id
                if !kept.iter().any(|&d| balls[c].is_subset_within(&balls[d], uncovered)) {
                    kept.push(c);
                }
            }
            for c in kept {
                let mut next = uncovered.clone();
                next.difference_with(&self.balls[lvl][c]);
                free[j] = false;
                centers[j] = Some(c);
                let found = self.descend(&next, free, centers)?;
                free[j] = true;
                if found {
                    return Ok(true);
                }
                centers[j] = None;
            }
        }
        Ok(false)
    }
}

/// Largest `k` with `Σ_{j<k} max_v |N(v, j)| < n`; certifies `b(G) >= k + 1`.
pub fn lower_bound_ballsum(g: &Graph) -> BoundCertificate {
    let n = g.n();
    let mut bfs = Bfs::new(n);
    let mut maxima = Vec::new();
    let mut sum = 0usize;
    let mut order: Vec<usize> = (0..n).collect();
    // high-degree vertices tend to have the largest balls; visiting them
    // first lets the saturating radius exit after a single search
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let saturating = loop {
        let j = maxima.len();
        let mut best = 0;
        let mut hit = None;
        for &v in &order {
            let s = bfs.ball_size(g, v, j);
            if s > best {
                best = s;
                if sum + best >= n {
                    hit = Some((v, s));
                    break;
                }
            }
        }
        if hit.is_some() {
            break hit;
        }
        maxima.push(best);
        sum += best;
    };
    BoundCertificate {
        kind: BoundKind::BallsumLower,
        value: maxima.len() + 1,
        evidence: Evidence::BallSum { maxima, saturating },
    }
}

/// `1 + min_v ecc(v)`: burn from a center and wait.
pub fn upper_bound_center(g: &Graph) -> Result<BoundCertificate> {
    let n = g.n();
    let mut bfs = Bfs::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let first = order[0];
    let mut best = match bfs.eccentricity(g, first) {
        Hops::Finite(e) => (e as usize, first),
        Hops::Infinite => return Err(Error::Disconnected),
    };
    for &v in &order[1..] {
        if best.0 == 0 {
            break;
        }
        // only a strictly smaller eccentricity matters, so the search can
        // stop at radius best - 1
        if let Some(e) = bfs.eccentricity_at_most(g, v, best.0 - 1) {
            best = (e as usize, v);
        }
    }
    Ok(BoundCertificate {
        kind: BoundKind::EccentricityUpper,
        value: best.0 + 1,
        evidence: Evidence::Center {
            vertex: best.1,
            eccentricity: best.0,
        },
    })
}

/// Cover `uncovered` greedily with one ball per radius in `radii` (in the
/// given order), each time taking the center that covers the most uncovered
/// vertices, ties to the smallest id. Returns the chosen centers.
pub(crate) fn greedy_cover(g: &Graph, uncovered: &mut BitSet, radii: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut bfs = Bfs::new(n);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if uncovered.is_empty() {
            out.push(0);
            continue;
        }
        let mut best = (0usize, 0usize);
        for c in 0..n {
            let mut gain = 0;
            bfs.visit_within(g, c, r, |u, _| {
                if uncovered.contains(u) {
                    gain += 1
                }
            });
            if gain > best.0 {
                best = (gain, c);
            }
        }
        let c = best.1;
        bfs.visit_within(g, c, r, |u, _| uncovered.remove(u));
        out.push(c);
    }
    out
}

/// Greedy covering for `k = lower bound, lower bound + 1, …`; the first `k`
/// that covers is an upper bound on `b(G)`.
pub fn greedy_schedule(g: &Graph) -> (BurnSchedule, BoundCertificate) {
    let n = g.n();
    let mut k = lower_bound_ballsum(g).value;
    loop {
        let mut uncovered = BitSet::full(n);
        let radii: Vec<usize> = (0..k).rev().collect();
        let centers = greedy_cover(g, &mut uncovered, &radii);
        if uncovered.is_empty() {
            let schedule = repair_schedule(g, &centers).expect("valid ids");
            let cert = BoundCertificate {
                kind: BoundKind::GreedyUpper,
                value: k,
                evidence: Evidence::Schedule {
                    sources: schedule.sources.clone(),
                },
            };
            return (schedule, cert);
        }
        k += 1;
    }
}

/// `b(G) = 2` iff some vertex is adjacent to all but at most one other vertex
/// (equivalently, the complement has a vertex of degree at most one).
pub fn is_b_two(g: &Graph) -> Result<bool> {
    Ok(b_two_certificate(g)?.is_some())
}

pub fn b_two_certificate(g: &Graph) -> Result<Option<BoundCertificate>> {
    let n = g.n();
    if n < 2 {
        return Err(invalid("b = 2 test needs at least two vertices"));
    }
    Ok((0..n).find(|&v| g.degree(v) + 2 >= n).map(|v| BoundCertificate {
        kind: BoundKind::B2Characterization,
        value: 2,
        evidence: Evidence::NearUniversal {
            vertex: v,
            degree: g.degree(v),
        },
    }))
}

/// Every certificate that applies to `g`.
pub fn certificates(g: &Graph) -> Vec<BoundCertificate> {
    let mut out = vec![lower_bound_ballsum(g)];
    if let Ok(c) = upper_bound_center(g) {
        out.push(c);
    }
    out.push(greedy_schedule(g).1);
    if let Ok(Some(c)) = b_two_certificate(g) {
        out.push(c);
    }
    out
}

/// Post-solve check: the witness is strict and completes within `b` rounds.
pub fn verify_witness(g: &Graph, result: &SolveResult) -> Result<bool> {
    let trace = simulate(g, &result.witness)?;
    Ok(result.witness.len() <= result.b && matches!(trace.completion, Completion::Round(t) if t <= result.b))
}
