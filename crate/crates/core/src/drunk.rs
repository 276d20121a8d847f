//! Random ignition rules and Monte-Carlo estimates of the resulting burning
//! times.
//!
//! Every round spreads first and then selects a vertex. The three rules
//! pick uniformly from all vertices, from vertices never selected before,
//! or from vertices not yet burning. A trial ends at the first round after
//! which everything burns.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::rng::{mix, SplitMix64};
use crate::solver::{burning_number_exact_with, SolverConfig};
use crate::stats::{quantile_sorted, Summary};
use crate::strategies::ceil_sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DrunkVariant {
    UniformAll,
    UniformUnselected,
    UniformUnburned,
}

impl DrunkVariant {
    pub const ALL: [DrunkVariant; 3] = [Self::UniformAll, Self::UniformUnselected, Self::UniformUnburned];

    pub fn index(self) -> u8 {
        match self {
            Self::UniformAll => 1,
            Self::UniformUnselected => 2,
            Self::UniformUnburned => 3,
        }
    }
}

impl fmt::Display for DrunkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FromStr for DrunkVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "i" | "uniform_all" => Ok(Self::UniformAll),
            "2" | "ii" | "uniform_unselected" => Ok(Self::UniformUnselected),
            "3" | "iii" | "uniform_unburned" => Ok(Self::UniformUnburned),
            other => Err(invalid(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Rounds(u64),
    /// Hit the round cap without burning everything.
    Stalled,
}

impl TrialOutcome {
    pub fn rounds(self) -> Option<u64> {
        match self {
            Self::Rounds(t) => Some(t),
            Self::Stalled => None,
        }
    }
}

impl Serialize for TrialOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Rounds(t) => s.serialize_u64(*t),
            Self::Stalled => s.serialize_str("stalled"),
        }
    }
}

/// Rounds allowed before a trial is declared stalled. Variants 2 and 3
/// always finish far earlier on any graph; variant 1 finishes with
/// probability one, so the cap only guards against pathological runs.
pub fn round_cap(n: usize) -> u64 {
    64 * n as u64 + 64
}

/// Vertices not yet selected, drawn without replacement by a sparse
/// Fisher–Yates shuffle.
#[derive(Debug, Clone, Default)]
pub struct UnselectedPool {
    remaining: usize,
    moved: HashMap<usize, usize>,
}

impl UnselectedPool {
    pub fn new(n: usize) -> Self {
        Self {
            remaining: n,
            moved: HashMap::new(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn draw(&mut self, rng: &mut SplitMix64) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        let j = rng.below_usize(self.remaining);
        let last = self.remaining - 1;
        let picked = self.moved.get(&j).copied().unwrap_or(j);
        let tail = self.moved.remove(&last).unwrap_or(last);
        if j != last {
            self.moved.insert(j, tail);
        }
        self.remaining = last;
        Some(picked)
    }
}

/// One selection. Variant 3 draws a rank among the `unburned` vertices and
/// `rank_to_vertex` resolves it in increasing id order, so both kernels
/// consume the generator identically.
fn select(
    variant: DrunkVariant,
    rng: &mut SplitMix64,
    pool: &mut UnselectedPool,
    n: usize,
    unburned: usize,
    rank_to_vertex: impl FnOnce(usize) -> usize,
) -> Option<usize> {
    match variant {
        DrunkVariant::UniformAll => Some(rng.below_usize(n)),
        DrunkVariant::UniformUnselected => pool.draw(rng),
        DrunkVariant::UniformUnburned => Some(rank_to_vertex(rng.below_usize(unburned))),
    }
}

pub fn drunk_trial(g: &Graph, variant: DrunkVariant, seed: u64) -> TrialOutcome {
    let n = g.n();
    let mut rng = SplitMix64::new(seed);
    let mut pool = UnselectedPool::new(if variant == DrunkVariant::UniformUnselected { n } else { 0 });
    let mut burned = BitSet::new(n);
    let mut count = 0;
    let mut frontier: Vec<u32> = Vec::new();
    let mut next: Vec<u32> = Vec::new();
    for t in 1..=round_cap(n) {
        next.clear();
        for &u in &frontier {
            for &w in g.neighbors(u as usize) {
                if burned.insert(w as usize) {
                    next.push(w);
                }
            }
        }
        count += next.len();
        if count == n {
            return TrialOutcome::Rounds(t);
        }
        let pick = select(variant, &mut rng, &mut pool, n, n - count, |r| {
            burned.nth_unset(r).expect("rank below unburned count")
        });
        if let Some(v) = pick {
            if burned.insert(v) {
                next.push(v as u32);
                count += 1;
            }
        }
        if count == n {
            return TrialOutcome::Rounds(t);
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    TrialOutcome::Stalled
}

/// [`drunk_trial`] on `P_n` without building the graph: the unburned set is
/// kept as sorted maximal gaps, and spreading trims one vertex from every
/// gap end that touches a burned vertex.
pub fn path_drunk_trial_fast(n: usize, variant: DrunkVariant, seed: u64) -> TrialOutcome {
    if n == 0 {
        return TrialOutcome::Rounds(0);
    }
    let mut rng = SplitMix64::new(seed);
    let mut pool = UnselectedPool::new(if variant == DrunkVariant::UniformUnselected { n } else { 0 });
    let last = n - 1;
    let mut gaps: Vec<(usize, usize)> = vec![(0, last)];
    let mut unburned = n;
    for t in 1..=round_cap(n) {
        if unburned < n {
            gaps.retain_mut(|(lo, hi)| {
                let before = *hi - *lo + 1;
                let new_lo = if *lo > 0 { *lo + 1 } else { *lo };
                let new_hi = if *hi < last { hi.wrapping_sub(1) } else { *hi };
                if new_hi == usize::MAX || new_lo > new_hi {
                    unburned -= before;
                    return false;
                }
                unburned -= before - (new_hi - new_lo + 1);
                *lo = new_lo;
                *hi = new_hi;
                true
            });
        }
        if unburned == 0 {
            return TrialOutcome::Rounds(t);
        }
        let pick = select(variant, &mut rng, &mut pool, n, unburned, |mut r| {
            for &(lo, hi) in &gaps {
                let len = hi - lo + 1;
                if r < len {
                    return lo + r;
                }
                r -= len;
            }
            unreachable!("rank below unburned count")
        });
        if let Some(v) = pick {
            let idx = gaps.partition_point(|&(lo, _)| lo <= v);
            if idx > 0 && gaps[idx - 1].1 >= v {
                let (lo, hi) = gaps[idx - 1];
                unburned -= 1;
                match (lo == v, hi == v) {
                    (true, true) => {
                        gaps.remove(idx - 1);
                    }
                    (true, false) => gaps[idx - 1].0 = v + 1,
                    (false, true) => gaps[idx - 1].1 = v - 1,
                    (false, false) => {
                        gaps[idx - 1].1 = v - 1;
                        gaps.insert(idx, (v + 1, hi));
                    }
                }
            }
        }
        if unburned == 0 {
            return TrialOutcome::Rounds(t);
        }
    }
    TrialOutcome::Stalled
}

#[derive(Debug, Clone, Copy)]
pub enum Instance<'a> {
    Graph(&'a Graph),
    /// `P_n`, run on the gap kernel.
    Path(usize),
}

impl Instance<'_> {
    pub fn n(&self) -> usize {
        match self {
            Instance::Graph(g) => g.n(),
            Instance::Path(n) => *n,
        }
    }

    fn trial(&self, variant: DrunkVariant, seed: u64) -> TrialOutcome {
        match self {
            Instance::Graph(g) => drunk_trial(g, variant, seed),
            Instance::Path(n) => path_drunk_trial_fast(*n, variant, seed),
        }
    }

    /// `⌈√n⌉` for paths; the exact solver for small graphs.
    pub fn burning_number(&self) -> Option<usize> {
        match self {
            Instance::Path(n) => Some(ceil_sqrt(*n as u64) as usize),
            Instance::Graph(g) if g.n() <= REFERENCE_SOLVE_LIMIT => {
                burning_number_exact_with(g, SolverConfig { node_budget: 1_000_000 })
                    .solved()
                    .map(|r| r.b)
            }
            Instance::Graph(_) => None,
        }
    }
}

const REFERENCE_SOLVE_LIMIT: usize = 64;
pub const FULL_SAMPLE_LIMIT: usize = 100_000;
pub const RESERVOIR_SIZE: usize = 10_000;
const RESERVOIR_SALT: u64 = 0x9e6c_63d0_876a_3f5b;

#[derive(Debug, Clone, Serialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialStats {
    pub variant: DrunkVariant,
    pub n: usize,
    pub trials: usize,
    pub stalled: usize,
    pub master_seed: u64,
    pub mean: f64,
    pub stddev: f64,
    pub min: u64,
    pub max: u64,
    pub quantiles: Quantiles,
    /// Quantiles come from a reservoir rather than all samples.
    pub approximate_quantiles: bool,
    pub ci95: f64,
    pub b_reference: Option<usize>,
    pub cost: Option<f64>,
    /// Completed trial counts, in trial order; a hashed reservoir of
    /// [`RESERVOIR_SIZE`] when there are more than [`FULL_SAMPLE_LIMIT`].
    #[serde(skip)]
    pub samples: Vec<u64>,
}

pub fn drunk_estimate(inst: Instance<'_>, variant: DrunkVariant, trials: usize, master_seed: u64) -> Result<TrialStats> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if inst.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|i| inst.trial(variant, mix(master_seed, i)))
        .collect();
    let done: Vec<u64> = outcomes.iter().filter_map(|o| o.rounds()).collect();
    let stalled = trials - done.len();
    let summary = Summary::of(&done).ok_or(Error::AllStalled(trials))?;

    let (samples, approximate_quantiles) = if done.len() <= FULL_SAMPLE_LIMIT {
        (done, false)
    } else {
        // bottom-k by a hash of the trial index: independent of scheduling
        let mut keyed: Vec<(u64, u64)> = outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.rounds().map(|t| (mix(master_seed ^ RESERVOIR_SALT, i as u64), t)))
            .collect();
        keyed.sort_unstable();
        keyed.truncate(RESERVOIR_SIZE);
        (keyed.into_iter().map(|(_, t)| t).collect(), true)
    };
    let mut sorted = samples.clone();
    sorted.sort_unstable();
    let b_reference = inst.burning_number();
    Ok(TrialStats {
        variant,
        n: inst.n(),
        trials,
        stalled,
        master_seed,
        mean: summary.mean,
        stddev: summary.stddev,
        min: summary.min,
        max: summary.max,
        quantiles: Quantiles {
            p05: quantile_sorted(&sorted, 0.05),
            p50: quantile_sorted(&sorted, 0.5),
            p95: quantile_sorted(&sorted, 0.95),
        },
        approximate_quantiles,
        ci95: summary.ci95,
        b_reference,
        cost: b_reference.map(|b| summary.mean / b as f64),
        samples,
    })
}

/// Mean rounds divided by the burning number.
pub fn cost_of_drunkenness(inst: Instance<'_>, variant: DrunkVariant, trials: usize, master_seed: u64) -> Result<f64> {
    if inst.burning_number().is_none() {
        return Err(Error::ReferenceUnavailable(format!(
            "no exact burning number for a {}-vertex graph",
            inst.n()
        )));
    }
    let stats = drunk_estimate(inst, variant, trials, master_seed)?;
    Ok(stats.cost.expect("reference checked above"))
}
