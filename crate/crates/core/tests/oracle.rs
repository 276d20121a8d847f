//! Independent oracles built straight from the process definition, compared
//! against the solvers and the drunk kernels.

use std::collections::{HashMap, HashSet};

use burnlab::drunk::{drunk_estimate, DrunkVariant, Instance};
use burnlab::generators::{cycle, path, star};
use burnlab::rng::{mix, SplitMix64};
use burnlab::solver::{burning_number_bruteforce, burning_number_exact, is_b_two};
use burnlab::Graph;

/// Closed neighborhoods as bitmasks.
fn closed_nbhd(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &w| m | 1 << w))
        .collect()
}

fn spread(nb: &[u32], s: u32) -> u32 {
    (0..nb.len()).filter(|&v| s >> v & 1 == 1).fold(s, |m, v| m | nb[v])
}

/// Fewest rounds to burn everything, by breadth-first search over the sets
/// reachable when each round spreads and then ignites any unburned vertex.
fn definition_b(g: &Graph) -> usize {
    let n = g.n();
    let full = (1u32 << n) - 1;
    let nb = closed_nbhd(g);
    let mut level: HashSet<u32> = (0..n).map(|v| 1u32 << v).collect();
    let mut t = 1;
    loop {
        if level.contains(&full) {
            return t;
        }
        let mut next = HashSet::new();
        for &s in &level {
            let s = spread(&nb, s);
            if s == full {
                next.insert(s);
                continue;
            }
            for v in 0..n {
                if s >> v & 1 == 0 {
                    next.insert(s | 1 << v);
                }
            }
        }
        level = next;
        t += 1;
    }
}

fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        Graph::from_edges(n, &edges).unwrap()
    })
}

#[test]
fn solvers_match_definition_on_all_small_graphs() {
    for n in 1..=6 {
        for g in all_graphs(n) {
            let want = definition_b(&g);
            assert_eq!(burning_number_bruteforce(&g).unwrap().b, want, "{g:?}");
            assert_eq!(burning_number_exact(&g).solved().unwrap().b, want, "{g:?}");
            if n >= 2 {
                assert_eq!(is_b_two(&g).unwrap(), want == 2, "{g:?}");
            }
        }
    }
}

#[test]
fn solvers_match_definition_on_random_graphs() {
    for i in 0..150u64 {
        let mut rng = SplitMix64::new(mix(77, i));
        let n = 7 + rng.below_usize(4);
        let p = 0.1 + 0.5 * rng.next_f64();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.bernoulli(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        assert_eq!(burning_number_exact(&g).solved().unwrap().b, definition_b(&g), "{g:?}");
    }
}

/// Exact expected round count of a drunk process on a connected graph.
/// State is the burned set plus, for the unselected variant, the set of
/// vertices already drawn.
struct Expectation<'a> {
    nb: &'a [u32],
    variant: DrunkVariant,
    memo: HashMap<(u32, u32), f64>,
}

impl Expectation<'_> {
    fn full(&self) -> u32 {
        (1u32 << self.nb.len()) - 1
    }

    /// Choices after spreading to `s`, as (probability, vertex or none).
    fn choices(&self, s: u32, drawn: u32) -> Vec<(f64, Option<usize>)> {
        let n = self.nb.len();
        let pool: Vec<usize> = match self.variant {
            DrunkVariant::UniformAll => (0..n).collect(),
            DrunkVariant::UniformUnselected => (0..n).filter(|&v| drawn >> v & 1 == 0).collect(),
            DrunkVariant::UniformUnburned => (0..n).filter(|&v| s >> v & 1 == 0).collect(),
        };
        if pool.is_empty() {
            return vec![(1.0, None)];
        }
        let p = 1.0 / pool.len() as f64;
        pool.into_iter().map(|v| (p, Some(v))).collect()
    }

    /// Expected rounds still to come after a round ended with burned set `s`.
    fn remaining(&mut self, s: u32, drawn: u32) -> f64 {
        if s == self.full() {
            return 0.0;
        }
        if let Some(&e) = self.memo.get(&(s, drawn)) {
            return e;
        }
        let spreaded = spread(self.nb, s);
        assert_ne!(spreaded, s, "graph must be connected");
        let mut e = 1.0;
        if spreaded != self.full() {
            for (p, v) in self.choices(spreaded, drawn) {
                let (s2, d2) = match v {
                    Some(v) => (spreaded | 1 << v, drawn | 1 << v),
                    None => (spreaded, drawn),
                };
                e += p * self.remaining(s2, d2);
            }
        }
        self.memo.insert((s, drawn), e);
        e
    }

    fn expected(g: &Graph, variant: DrunkVariant) -> f64 {
        let nb = closed_nbhd(g);
        let mut ex = Expectation {
            nb: &nb,
            variant,
            memo: HashMap::new(),
        };
        let n = g.n();
        // The first draw always lands on an unburned vertex, uniformly.
        1.0 + (0..n).map(|v| ex.remaining(1 << v, 1 << v)).sum::<f64>() / n as f64
    }
}

#[test]
fn p3_uniform_all_expectation() {
    let e = Expectation::expected(&path(3).unwrap(), DrunkVariant::UniformAll);
    assert!((e - 22.0 / 9.0).abs() < 1e-12, "{e}");
}

#[test]
fn p3_unburned_variant_always_takes_two_rounds() {
    let e = Expectation::expected(&path(3).unwrap(), DrunkVariant::UniformUnburned);
    assert!((e - 2.0).abs() < 1e-12);
}

#[test]
fn monte_carlo_matches_exact_expectation() {
    let graphs = [path(6).unwrap(), cycle(7).unwrap(), star(5).unwrap(), path(9).unwrap()];
    for g in &graphs {
        for v in DrunkVariant::ALL {
            let exact = Expectation::expected(g, v);
            let est = drunk_estimate(Instance::Graph(g), v, 40_000, 123).unwrap();
            let se = est.stddev / (est.trials as f64).sqrt();
            assert!(
                (est.mean - exact).abs() <= 5.0 * se + 1e-9,
                "n={} variant {v}: estimate {} vs exact {exact}",
                g.n(),
                est.mean
            );
        }
    }
}

#[test]
fn path_instance_matches_graph_instance_expectation() {
    for n in [4usize, 7] {
        let g = path(n).unwrap();
        for v in DrunkVariant::ALL {
            let exact = Expectation::expected(&g, v);
            let est = drunk_estimate(Instance::Path(n), v, 40_000, 9).unwrap();
            let se = est.stddev / (est.trials as f64).sqrt();
            assert!((est.mean - exact).abs() <= 5.0 * se + 1e-9, "n={n} variant {v}");
        }
    }
}
