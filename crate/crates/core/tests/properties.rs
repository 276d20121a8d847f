use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;

use burnlab::bitset::BitSet;
use burnlab::burn::{covered_by_balls, repair_schedule, simulate, BurnSchedule, Completion};
use burnlab::drunk::{drunk_trial, path_drunk_trial_fast, DrunkVariant};
use burnlab::generators::{geometric_graph, grid, path, torus, PointSet};
use burnlab::solver::{burning_number_exact, greedy_schedule, is_b_two, lower_bound_ballsum, upper_bound_center};
use burnlab::strategies::{grid_lower_bound, grid_narrow_schedule, grid_regime, grid_strip_schedule, GridRegime};
use burnlab::{Graph, Hops};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let edges: BTreeSet<(usize, usize)> =
                pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            Graph::from_edges(n, &edges.into_iter().collect::<Vec<_>>()).unwrap()
        })
    })
}

fn arb_connected(max_n: usize) -> impl Strategy<Value = Graph> {
    // A random tree (each vertex attaches to an earlier one) plus extra edges.
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<prop::sample::Index>(), n),
            prop::collection::vec((0..n, 0..n), 0..n),
        )
            .prop_map(move |(parents, extra)| {
                let mut edges = BTreeSet::new();
                for (v, parent) in parents.iter().enumerate().skip(1) {
                    edges.insert((parent.index(v), v));
                }
                for (u, v) in extra {
                    if u != v {
                        edges.insert((u.min(v), u.max(v)));
                    }
                }
                Graph::from_edges(n, &edges.into_iter().collect::<Vec<_>>()).unwrap()
            })
    })
}

fn naive_distances(g: &Graph, s: usize) -> Vec<Option<usize>> {
    let mut d = vec![None; g.n()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for w in 0..g.n() {
            if g.has_edge(u, w) && d[w].is_none() {
                d[w] = Some(d[u].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn burned_sets_are_unions_of_balls(g in arb_graph(40), raw in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let n = g.n();
        let sources: Vec<usize> = raw.iter().map(|i| i.index(n)).collect();
        let trace = simulate(&g, &BurnSchedule::permissive(sources.clone())).unwrap();
        let dist: Vec<_> = (0..n).map(|s| naive_distances(&g, s)).collect();
        for t in 1..=trace.rounds.len() {
            let burned = trace.burned_after(t);
            let union: Vec<usize> = (0..n)
                .filter(|&v| sources.iter().take(t).enumerate().any(|(i, &x)| dist[x][v].is_some_and(|d| d + i < t)))
                .collect();
            prop_assert_eq!(burned.iter().collect::<Vec<_>>(), union);
        }
        if let Completion::Round(t) = trace.completion {
            prop_assert_eq!(trace.burned_after(t).count(), n);
        }
    }

    #[test]
    fn balls_and_spheres_agree_with_bfs(g in arb_graph(30), v in any::<prop::sample::Index>(), r in 0usize..6) {
        let v = v.index(g.n());
        let d = naive_distances(&g, v);
        let ball: Vec<usize> = (0..g.n()).filter(|&u| d[u].is_some_and(|x| x <= r)).collect();
        let sphere: Vec<usize> = (0..g.n()).filter(|&u| d[u] == Some(r)).collect();
        prop_assert_eq!(g.ball(v, r).unwrap(), ball.clone());
        prop_assert_eq!(g.sphere(v, r).unwrap(), sphere);
        prop_assert_eq!(g.ball_size(v, r).unwrap(), ball.len());
        if r > 0 {
            let inner = g.ball_size(v, r - 1).unwrap();
            prop_assert_eq!(inner + g.sphere(v, r).unwrap().len(), ball.len());
        }
        let ecc = d.iter().try_fold(0, |m, x| x.map(|x| m.max(x)));
        prop_assert_eq!(g.eccentricity(v).unwrap(), ecc.map_or(Hops::Infinite, |e| Hops::Finite(e as u32)));
    }

    #[test]
    fn bucket_grid_matches_all_pairs(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..120), r in 0.0f64..0.6) {
        let set = PointSet { points: pts.clone(), r };
        let g = geometric_graph(&set).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                prop_assert_eq!(g.has_edge(i, j), dx * dx + dy * dy <= r * r, "{} {}", i, j);
            }
        }
    }

    #[test]
    fn path_kernel_equals_graph_kernel(n in 1usize..120, seed in any::<u64>(), v in 0usize..3) {
        let variant = DrunkVariant::ALL[v];
        prop_assert_eq!(path_drunk_trial_fast(n, variant, seed), drunk_trial(&path(n).unwrap(), variant, seed));
    }

    #[test]
    fn repair_keeps_a_covering(g in arb_connected(30), raw in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let n = g.n();
        let centers: Vec<usize> = raw.iter().map(|i| i.index(n)).collect();
        let k = centers.len();
        let repaired = repair_schedule(&g, &centers).unwrap();
        let t = simulate(&g, &repaired).unwrap();
        if covered_by_balls(&g, &centers, k).unwrap() {
            prop_assert!(matches!(t.completion, Completion::Round(r) if r <= k));
        }
    }

    #[test]
    fn bounds_sandwich_the_burning_number(g in arb_connected(14)) {
        let b = burning_number_exact(&g).solved().unwrap().b;
        prop_assert!(lower_bound_ballsum(&g).value <= b);
        prop_assert!(b <= upper_bound_center(&g).unwrap().value);
        let (sched, cert) = greedy_schedule(&g);
        prop_assert!(b <= cert.value);
        let done = simulate(&g, &sched).unwrap().completion;
        prop_assert!(matches!(done, Completion::Round(r) if r <= cert.value));
        if g.n() >= 2 {
            prop_assert_eq!(is_b_two(&g).unwrap(), b == 2);
        }
    }

    #[test]
    fn bitset_matches_btreeset(ops in prop::collection::vec((0usize..3, 0usize..200), 0..300)) {
        let mut bs = BitSet::new(200);
        let mut reference = BTreeSet::new();
        for (op, i) in ops {
            match op {
                0 => prop_assert_eq!(bs.insert(i), reference.insert(i)),
                1 => { bs.remove(i); reference.remove(&i); }
                _ => prop_assert_eq!(bs.contains(i), reference.contains(&i)),
            }
        }
        prop_assert_eq!(bs.count(), reference.len());
        prop_assert_eq!(bs.iter().collect::<Vec<_>>(), reference.iter().copied().collect::<Vec<_>>());
        let first_free = (0..200).find(|i| !reference.contains(i));
        prop_assert_eq!(bs.first_unset(), first_free);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn grid_schedules_respect_the_lower_bound(m in 1usize..40, n in 1usize..40) {
        let lb = grid_lower_bound(m, n).unwrap();
        let plan = match grid_regime(m, n) {
            GridRegime::Narrow => grid_narrow_schedule(m, n).unwrap(),
            GridRegime::Wide => grid_strip_schedule(m, n, 1.0).unwrap(),
        };
        let g = grid(m, n).unwrap();
        let done = simulate(&g, &plan.schedule).unwrap().completion;
        prop_assert_eq!(done, plan.achieved_rounds);
        prop_assert!(matches!(done, Completion::Round(r) if r >= lb));
    }
}

#[test]
fn torus_burns_no_slower_than_grid() {
    for (m, n) in [(3, 3), (3, 4), (4, 4), (3, 5)] {
        let bt = burning_number_exact(&torus(m, n).unwrap()).solved().unwrap().b;
        let bg = burning_number_exact(&grid(m, n).unwrap()).solved().unwrap().b;
        assert!(bt <= bg, "{m}x{n}: torus {bt}, grid {bg}");
    }
}
