//! Immutable simple undirected graphs and BFS-based distance queries.
//!
//! Vertices are dense ids `0..n`. Adjacency is stored in CSR form with each
//! neighbor list strictly sorted. Distance queries go through [`Bfs`], a
//! reusable scratch buffer whose visited marks are keyed by a generation
//! counter so repeated searches never clear the whole array.

use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A hop count that may be infinite (unreachable / disconnected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hops {
    Finite(u32),
    Infinite,
}

impl Hops {
    pub fn finite(self) -> Option<u32> {
        match self {
            Hops::Finite(d) => Some(d),
            Hops::Infinite => None,
        }
    }
}

impl fmt::Display for Hops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hops::Finite(d) => write!(f, "{d}"),
            Hops::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Hops {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Hops::Finite(d) => s.serialize_u32(*d),
            Hops::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Hops {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Hops::Finite(n)),
            Raw::Str(s) if s == "inf" => Ok(Hops::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Internal marker for unreachable vertices in distance arrays.
pub(crate) const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

impl Graph {
    /// Build a graph, rejecting out-of-range ids, self-loops and duplicate
    /// pairs (in either orientation).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("{n} vertices exceeds u32 ids")));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::VertexOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            let list = &mut targets[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v.min(w[0] as usize), v.max(w[0] as usize));
                return Err(Error::DuplicateEdge(a, b));
            }
        }
        Ok(Self { offsets, targets })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { id: v, n: self.n() })
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Subgraph induced by `vertices` (relabelled `0..k` in the given order).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![u32::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i as u32;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = index[w as usize];
                if j != u32::MAX && (j as usize) > i {
                    edges.push((i, j as usize));
                }
            }
        }
        Graph::from_edges(vertices.len(), &edges)
    }

    pub fn bfs_distances(&self, v: usize) -> Result<DistanceMap> {
        self.check_vertex(v)?;
        let mut bfs = Bfs::new(self.n());
        Ok(bfs.distances(self, v))
    }

    /// `N(v, r)`: vertices at distance at most `r` from `v`, ascending.
    pub fn ball(&self, v: usize, r: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut out = Vec::new();
        Bfs::new(self.n()).visit_within(self, v, r, |u, _| out.push(u));
        out.sort_unstable();
        Ok(out)
    }

    pub fn ball_size(&self, v: usize, r: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(Bfs::new(self.n()).ball_size(self, v, r))
    }

    /// `S(v, r)`: vertices at distance exactly `r` from `v`, ascending.
    pub fn sphere(&self, v: usize, r: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut out = Vec::new();
        Bfs::new(self.n()).visit_within(self, v, r, |u, d| {
            if d as usize == r {
                out.push(u)
            }
        });
        out.sort_unstable();
        Ok(out)
    }

    pub fn eccentricity(&self, v: usize) -> Result<Hops> {
        self.check_vertex(v)?;
        Ok(Bfs::new(self.n()).eccentricity(self, v))
    }

    /// Maximum eccentricity; BFS sources are spread over the rayon pool.
    pub fn diameter(&self) -> Hops {
        (0..self.n())
            .into_par_iter()
            .map_init(|| Bfs::new(self.n()), |bfs, v| bfs.eccentricity(self, v))
            .max()
            .unwrap_or(Hops::Finite(0))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![s];
            label[s] = id;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    let w = w as usize;
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        Bfs::new(self.n()).ball_size(self, 0, usize::MAX) == self.n()
    }

    /// All-pairs hop counts as a dense row-major `n × n` matrix.
    pub(crate) fn distance_matrix(&self) -> Vec<u32> {
        let n = self.n();
        let mut out = vec![UNREACHABLE; n * n];
        out.par_chunks_mut(n)
            .enumerate()
            .for_each_init(
                || Bfs::new(n),
                |bfs, (v, row)| {
                    bfs.visit_within(self, v, usize::MAX, |u, d| row[u] = d);
                },
            );
        out
    }

    /// Edge-list text: `n m` followed by one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.m())?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = r
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let header = header?;
        let [n, m] = parse_pair(&header, line)?;
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            let text = text?;
            edges.push(parse_pair(&text, line).map(|[u, v]| (u, v))?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, &edges)
    }
}

fn parse_pair(text: &str, line: usize) -> Result<[usize; 2]> {
    let mut it = text.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok([a, b]),
        _ => Err(Error::Parse {
            line,
            msg: format!("expected two non-negative integers, got {text:?}"),
        }),
    }
}

/// Single-source hop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    pub source: usize,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn get(&self, v: usize) -> Hops {
        match self.dist[v] {
            UNREACHABLE => Hops::Infinite,
            d => Hops::Finite(d),
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Hops> {
        (0..self.len()).map(|v| self.get(v)).collect()
    }
}

impl Serialize for DistanceMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DistanceMap", 2)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("dist", &self.to_vec())?;
        st.end()
    }
}

/// Reusable BFS scratch space. One per worker.
#[derive(Debug, Clone)]
pub struct Bfs {
    stamp: Vec<u32>,
    generation: u32,
    queue: Vec<(u32, u32)>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            generation: 0,
            queue: Vec::with_capacity(n),
        }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }

    /// Visit every vertex within `radius` of `src` in BFS order, passing
    /// `(vertex, distance)`. Returns the number visited.
    pub fn visit_within<F: FnMut(usize, u32)>(&mut self, g: &Graph, src: usize, radius: usize, mut f: F) -> usize {
        self.next_generation();
        let gen = self.generation;
        self.queue.clear();
        self.stamp[src] = gen;
        self.queue.push((src as u32, 0));
        let mut head = 0;
        while head < self.queue.len() {
            let (u, d) = self.queue[head];
            head += 1;
            f(u as usize, d);
            // once every vertex is queued there is nothing left to discover
            if d as usize >= radius || self.queue.len() == g.n() {
                continue;
            }
            for &w in g.neighbors(u as usize) {
                if self.stamp[w as usize] != gen {
                    self.stamp[w as usize] = gen;
                    self.queue.push((w, d + 1));
                }
            }
        }
        self.queue.len()
    }

    pub fn ball_size(&mut self, g: &Graph, src: usize, radius: usize) -> usize {
        self.visit_within(g, src, radius, |_, _| {})
    }

    pub fn distances(&mut self, g: &Graph, src: usize) -> DistanceMap {
        let mut dist = vec![UNREACHABLE; g.n()];
        self.visit_within(g, src, usize::MAX, |u, d| dist[u] = d);
        DistanceMap { source: src, dist }
    }

    pub fn eccentricity(&mut self, g: &Graph, src: usize) -> Hops {
        let mut far = 0;
        let seen = self.visit_within(g, src, usize::MAX, |_, d| far = d);
        if seen == g.n() {
            Hops::Finite(far)
        } else {
            Hops::Infinite
        }
    }

    /// Eccentricity of `src` if it is at most `limit`, otherwise `None`.
    /// Explores only the ball of radius `limit`.
    pub fn eccentricity_at_most(&mut self, g: &Graph, src: usize, limit: usize) -> Option<u32> {
        let mut far = 0;
        let seen = self.visit_within(g, src, limit, |_, d| far = d);
        (seen == g.n()).then_some(far)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn grid(m: usize, n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if j + 1 < n {
                    e.push((i * n + j, i * n + j + 1));
                }
                if i + 1 < m {
                    e.push((i * n + j, (i + 1) * n + j));
                }
            }
        }
        Graph::from_edges(m * n, &e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn build_examples() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.neighbors(1), &[0, 2]);
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(Graph::from_edges(3, &[(2, 2)]), Err(Error::SelfLoop(2))));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(Error::VertexOutOfRange { id: 3, n: 3 })
        ));
        assert!(matches!(Graph::from_edges(0, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn distances() {
        let p3 = path(3);
        assert_eq!(
            p3.bfs_distances(0).unwrap().to_vec(),
            vec![Hops::Finite(0), Hops::Finite(1), Hops::Finite(2)]
        );
        let k4 = complete(4);
        assert_eq!(
            k4.bfs_distances(2).unwrap().to_vec(),
            vec![Hops::Finite(1), Hops::Finite(1), Hops::Finite(0), Hops::Finite(1)]
        );
        let two = Graph::from_edges(2, &[]).unwrap();
        let d = two.bfs_distances(0).unwrap();
        assert_eq!(d.to_vec(), vec![Hops::Finite(0), Hops::Infinite]);
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"source":0,"dist":[0,"inf"]}"#);
        assert!(two.bfs_distances(2).is_err());
    }

    #[test]
    fn balls_and_spheres() {
        let g = grid(5, 5);
        let center = 2 * 5 + 2;
        assert_eq!(g.ball_size(center, 1).unwrap(), 5);
        // 1 + 2r(r+1) at r = 2
        assert_eq!(g.ball_size(center, 2).unwrap(), 13);
        assert_eq!(g.ball(7, 0).unwrap(), vec![7]);
        let p5 = path(5);
        assert_eq!(p5.sphere(2, 2).unwrap(), vec![0, 4]);
        assert_eq!(p5.sphere(2, 0).unwrap(), vec![2]);
        assert!(complete(3).sphere(0, 2).unwrap().is_empty());
    }

    #[test]
    fn eccentricity_and_diameter() {
        assert_eq!(path(7).eccentricity(0).unwrap(), Hops::Finite(6));
        assert_eq!(path(7).diameter(), Hops::Finite(6));
        assert_eq!(complete(5).diameter(), Hops::Finite(1));
        assert_eq!(grid(3, 3).diameter(), Hops::Finite(4));
        let two = Graph::from_edges(2, &[]).unwrap();
        assert_eq!(two.diameter(), Hops::Infinite);
        assert_eq!(two.eccentricity(0).unwrap().to_string(), "inf");
    }

    #[test]
    fn components_examples() {
        assert_eq!(path(5).components(), vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(Graph::from_edges(3, &[]).unwrap().components().len(), 3);
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let mut sizes: Vec<_> = g.components().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn edge_list_round_trip_and_rejects() {
        let g = grid(3, 4);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = Graph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(back, g);
        assert!(Graph::read_edge_list("3 2\n0 1\n1 0\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("3 2\n0 1\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("3 1\n0 x\n".as_bytes()).is_err());
    }

    #[test]
    fn bounded_eccentricity() {
        let g = path(9);
        let mut bfs = Bfs::new(9);
        assert_eq!(bfs.eccentricity_at_most(&g, 4, 4), Some(4));
        assert_eq!(bfs.eccentricity_at_most(&g, 4, 3), None);
        assert_eq!(bfs.eccentricity_at_most(&g, 0, 8), Some(8));
    }

    #[test]
    fn induced() {
        let g = path(5);
        let h = g.induced_subgraph(&[1, 2, 4]).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
