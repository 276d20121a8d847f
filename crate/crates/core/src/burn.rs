//! The burning process.
//!
//! Round `t >= 1` runs in two sub-steps: every unburned neighbor of a vertex
//! burned by the end of round `t - 1` catches fire (spread), then source
//! `x_t` is ignited (ignite). With this order the burned set at the end of
//! round `t` is exactly `⋃_{i <= min(t,k)} N(x_i, t - i)`.
//!
//! If every vertex is burning after the spread sub-step, the process ends in
//! that round and any remaining sources are ignored.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Serialize, Serializer};

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// Igniting an already-burned vertex is an error.
    Strict,
    /// Igniting an already-burned vertex is a no-op.
    Permissive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BurnSchedule {
    pub sources: Vec<usize>,
    pub strictness: Strictness,
}

impl BurnSchedule {
    pub fn strict(sources: Vec<usize>) -> Self {
        Self {
            sources,
            strictness: Strictness::Strict,
        }
    }

    pub fn permissive(sources: Vec<usize>) -> Self {
        Self {
            sources,
            strictness: Strictness::Permissive,
        }
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Schedule text: `k`, then one vertex id per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.sources.len())?;
        for s in &self.sources {
            writeln!(w, "{s}")?;
        }
        Ok(())
    }

    /// Parse schedule text; the result is strict unless `permissive`.
    pub fn read_from<R: BufRead>(r: R, strictness: Strictness) -> Result<BurnSchedule> {
        let mut ids = Vec::new();
        let mut declared = None;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("expected a vertex id, got {tok:?}"),
                })?;
                if declared.is_none() {
                    declared = Some(v);
                } else {
                    ids.push(v);
                }
            }
        }
        let k = declared.ok_or(Error::Parse { line: 1, msg: "missing length".into() })?;
        if k != ids.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("declared {k} sources, found {}", ids.len()),
            });
        }
        Ok(BurnSchedule { sources: ids, strictness })
    }
}

/// Round at which every vertex is burning, or `Incomplete` if spreading
/// stalled first (disconnected remainder).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Completion {
    Round(usize),
    Incomplete,
}

impl Completion {
    pub fn round(self) -> Option<usize> {
        match self {
            Completion::Round(t) => Some(t),
            Completion::Incomplete => None,
        }
    }
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completion::Round(t) => write!(f, "{t}"),
            Completion::Incomplete => f.write_str("incomplete"),
        }
    }
}

impl Serialize for Completion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Completion::Round(t) => s.serialize_u64(*t as u64),
            Completion::Incomplete => s.serialize_str("incomplete"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BurnTrace {
    /// `rounds[t - 1]` holds the vertices that caught fire in round `t`, ascending.
    pub rounds: Vec<Vec<usize>>,
    pub completion: Completion,
    #[serde(skip)]
    pub burned_final: BitSet,
}

impl BurnTrace {
    /// Burned set at the end of round `t` (`t = 0` is the empty set).
    pub fn burned_after(&self, t: usize) -> BitSet {
        let mut s = BitSet::new(self.burned_final.capacity());
        for round in self.rounds.iter().take(t) {
            for &v in round {
                s.insert(v);
            }
        }
        s
    }

    /// Debug dump: one line per round listing the newly burned ids.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        for round in &self.rounds {
            let line: Vec<String> = round.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn simulate(g: &Graph, schedule: &BurnSchedule) -> Result<BurnTrace> {
    let n = g.n();
    for &x in &schedule.sources {
        g.check_vertex(x)?;
    }
    let k = schedule.sources.len();
    let mut burned = BitSet::new(n);
    let mut count = 0usize;
    let mut frontier: Vec<usize> = Vec::new();
    let mut rounds = Vec::new();
    let mut t = 0usize;
    let completion = loop {
        t += 1;
        let mut fresh = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if burned.insert(w as usize) {
                    fresh.push(w as usize);
                }
            }
        }
        count += fresh.len();
        if count < n && t <= k {
            let x = schedule.sources[t - 1];
            if burned.insert(x) {
                fresh.push(x);
                count += 1;
            } else if schedule.strictness == Strictness::Strict {
                return Err(Error::AlreadyBurned { round: t, vertex: x });
            }
        }
        fresh.sort_unstable();
        let stalled = fresh.is_empty() && t >= k;
        rounds.push(fresh.clone());
        if count == n {
            break Completion::Round(t);
        }
        if stalled {
            rounds.pop();
            break Completion::Incomplete;
        }
        frontier = fresh;
    };
    Ok(BurnTrace {
        rounds,
        completion,
        burned_final: burned,
    })
}

/// Round at which each vertex catches fire when `centers[i]` is lit in round
/// `i + 1`, watching at most `horizon` rounds; `u32::MAX` if never.
pub(crate) fn burn_times(g: &Graph, centers: &[usize], horizon: usize) -> Vec<u32> {
    let mut time = vec![u32::MAX; g.n()];
    let mut frontier: Vec<usize> = Vec::new();
    let mut next = Vec::new();
    for t in 1..=horizon {
        next.clear();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if time[w as usize] == u32::MAX {
                    time[w as usize] = t as u32;
                    next.push(w as usize);
                }
            }
        }
        if let Some(&x) = centers.get(t - 1) {
            if time[x] == u32::MAX {
                time[x] = t as u32;
                next.push(x);
            }
        }
        if next.is_empty() && t >= centers.len() {
            break;
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    time
}

/// Whether `⋃_i N(centers[i], k - 1 - i)` (0-based `i`) covers every vertex.
pub fn covered_by_balls(g: &Graph, centers: &[usize], k: usize) -> Result<bool> {
    if centers.len() > k {
        return Err(invalid(format!("{} centers exceed {k} rounds", centers.len())));
    }
    for &x in centers {
        g.check_vertex(x)?;
    }
    Ok(burn_times(g, centers, k).iter().all(|&t| t != u32::MAX))
}

/// Replay `centers` through the process; whenever a center is already
/// burning at its turn, ignite the smallest-id unburned vertex instead.
/// Ignitions are dropped once everything burns.
pub fn repair_schedule(g: &Graph, centers: &[usize]) -> Result<BurnSchedule> {
    for &x in centers {
        g.check_vertex(x)?;
    }
    let n = g.n();
    let mut burned = BitSet::new(n);
    let mut count = 0;
    let mut frontier: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(centers.len());
    for &x in centers {
        let mut fresh = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if burned.insert(w as usize) {
                    fresh.push(w as usize);
                }
            }
        }
        count += fresh.len();
        if count == n {
            break;
        }
        let pick = if burned.contains(x) {
            burned.first_unset().expect("count < n")
        } else {
            x
        };
        burned.insert(pick);
        count += 1;
        fresh.push(pick);
        out.push(pick);
        frontier = fresh;
    }
    Ok(BurnSchedule::strict(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, path};

    #[test]
    fn path5_from_middle() {
        let g = path(5).unwrap();
        let tr = simulate(&g, &BurnSchedule::strict(vec![2])).unwrap();
        assert_eq!(tr.completion, Completion::Round(3));
        assert_eq!(tr.rounds, vec![vec![2], vec![1, 3], vec![0, 4]]);
    }

    #[test]
    fn complete_graph_two_rounds() {
        let g = complete(6).unwrap();
        let tr = simulate(&g, &BurnSchedule::strict(vec![4])).unwrap();
        assert_eq!(tr.completion, Completion::Round(2));
    }

    #[test]
    fn path4_two_sources() {
        let g = path(4).unwrap();
        let tr = simulate(&g, &BurnSchedule::strict(vec![1, 3])).unwrap();
        assert_eq!(tr.completion, Completion::Round(2));
        assert_eq!(tr.rounds, vec![vec![1], vec![0, 2, 3]]);
    }

    #[test]
    fn strict_rejects_burned_ignition() {
        let g = path(5).unwrap();
        let err = simulate(&g, &BurnSchedule::strict(vec![2, 1])).unwrap_err();
        assert!(matches!(err, Error::AlreadyBurned { round: 2, vertex: 1 }));
        // permissive: no-op, same trace as the single source
        let a = simulate(&g, &BurnSchedule::permissive(vec![2, 1])).unwrap();
        let b = simulate(&g, &BurnSchedule::permissive(vec![2])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disconnected_is_incomplete() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let tr = simulate(&g, &BurnSchedule::strict(vec![0])).unwrap();
        assert_eq!(tr.completion, Completion::Incomplete);
        assert_eq!(tr.burned_final.count(), 2);
        let tr = simulate(&g, &BurnSchedule::strict(vec![0, 3])).unwrap();
        assert_eq!(tr.completion, Completion::Round(3));
    }

    #[test]
    fn invalid_ids() {
        let g = path(3).unwrap();
        assert!(simulate(&g, &BurnSchedule::strict(vec![3])).is_err());
        assert!(covered_by_balls(&g, &[5], 1).is_err());
        assert!(covered_by_balls(&g, &[0, 1], 1).is_err());
    }

    #[test]
    fn covering_examples() {
        let g = path(9).unwrap();
        // radii 2, 1, 0: {2..6} ∪ {0,1,2} ∪ {8} misses 7
        assert!(!covered_by_balls(&g, &[4, 1, 8], 3).unwrap());
        // {0..4} ∪ {5,6,7} ∪ {8}
        assert!(covered_by_balls(&g, &[2, 6, 8], 3).unwrap());
        // single central ball with radius = eccentricity
        assert!(covered_by_balls(&g, &[4], 5).unwrap());
        assert!(!covered_by_balls(&g, &[4], 4).unwrap());
    }

    #[test]
    fn repair_examples() {
        let p3 = path(3).unwrap();
        let s = repair_schedule(&p3, &[1, 1]).unwrap();
        // after spread in round 2 everything burns: second ignition dropped
        assert_eq!(s.sources, vec![1]);
        let p5 = path(5).unwrap();
        let s = repair_schedule(&p5, &[1, 1]).unwrap();
        assert_eq!(s.sources, vec![1, 3]);
        let valid = repair_schedule(&p5, &[1, 4]).unwrap();
        assert_eq!(valid.sources, vec![1, 4]);
        let k3 = complete(3).unwrap();
        let s = repair_schedule(&k3, &[0, 1]).unwrap();
        assert_eq!(s.sources, vec![0]);
        assert_eq!(simulate(&k3, &s).unwrap().completion, Completion::Round(2));
    }

    #[test]
    fn schedule_text_round_trip() {
        let s = BurnSchedule::strict(vec![3, 1, 4]);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3\n3\n1\n4\n");
        assert_eq!(BurnSchedule::read_from(&buf[..], Strictness::Strict).unwrap(), s);
        assert!(BurnSchedule::read_from("2\n1\n".as_bytes(), Strictness::Strict).is_err());
    }

    #[test]
    fn trace_dump() {
        let g = path(3).unwrap();
        let tr = simulate(&g, &BurnSchedule::strict(vec![0, 2])).unwrap();
        let mut buf = Vec::new();
        tr.write_dump(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0\n1 2\n");
        assert_eq!(serde_json::to_string(&tr.completion).unwrap(), "2");
    }
}
