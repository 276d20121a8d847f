//! Seeded random and structured graph generators.
//!
//! All random generators draw from [`SplitMix64`] so a given
//! `(parameters, seed)` pair always yields the same graph.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::rng::SplitMix64;

/// A binomial random graph together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct GnpSample {
    pub graph: Graph,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    /// Expected degree `p (n - 1)`.
    pub d: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GnpOptions {
    /// For `p > 0.5`, draw the complement with probability `1 - p` and
    /// invert. Same distribution, different stream of draws.
    pub complement_dense: bool,
}

pub fn expected_degree(n: usize, p: f64) -> f64 {
    p * (n as f64 - 1.0)
}

/// `G(n, p)` with one Bernoulli draw per unordered pair, pairs visited in
/// lexicographic order `(0,1), (0,2), …, (n-2,n-1)`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<GnpSample> {
    gen_gnp_with(n, p, seed, GnpOptions::default())
}

pub fn gen_gnp_with(n: usize, p: f64, seed: u64, opts: GnpOptions) -> Result<GnpSample> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let invert = opts.complement_dense && p > 0.5;
    let q = if invert { 1.0 - p } else { p };
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli(q) != invert {
                edges.push((u, v));
            }
        }
    }
    Ok(GnpSample {
        graph: Graph::from_edges(n, &edges)?,
        n,
        p,
        seed,
        d: expected_degree(n, p),
    })
}

/// Points in the unit square backing a random geometric graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    pub points: Vec<(f64, f64)>,
    pub r: f64,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn subset(&self, ids: &[usize]) -> PointSet {
        PointSet {
            points: ids.iter().map(|&i| self.points[i]).collect(),
            r: self.r,
        }
    }

    /// `n r` header, then `x y` per line, 17 significant digits.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {:.16e}", self.points.len(), self.r)?;
        for (x, y) in &self.points {
            writeln!(w, "{x:.16e} {y:.16e}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<PointSet> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing header".into()))?;
        let header = header?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(hl, "bad point count".into()))?;
        let r: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(hl, "bad radius".into()))?;
        let mut points = Vec::with_capacity(n);
        for (ln, text) in lines {
            let text = text?;
            let xy: Vec<f64> = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(ln, e.to_string()))?;
            match xy[..] {
                [x, y] if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) => points.push((x, y)),
                _ => return Err(parse_err(ln, format!("expected a point in the unit square, got {text:?}"))),
            }
        }
        if points.len() != n {
            return Err(parse_err(hl, format!("header declares {n} points, found {}", points.len())));
        }
        if r < 0.0 {
            return Err(parse_err(hl, "negative radius".into()));
        }
        Ok(PointSet { points, r })
    }
}

/// Random geometric graph on `n` uniform points of `[0,1]²`: `u ~ v` iff
/// their Euclidean distance is at most `r`.
pub fn gen_rgg(n: usize, r: f64, seed: u64) -> Result<(Graph, PointSet)> {
    if r.is_nan() || r < 0.0 {
        return Err(invalid(format!("radius {r} must be non-negative")));
    }
    if r > std::f64::consts::SQRT_2 {
        return Err(invalid(format!("radius {r} exceeds sqrt(2)")));
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = SplitMix64::new(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.next_f64(), rng.next_f64())).collect();
    let pts = PointSet { points, r };
    let graph = geometric_graph(&pts)?;
    Ok((graph, pts))
}

/// Edges of the geometric graph on `pts`, found through a bucket grid whose
/// cell side is at least `r`, so only the 3×3 block around a cell can hold
/// neighbors.
pub fn geometric_graph(pts: &PointSet) -> Result<Graph> {
    let n = pts.len();
    let r2 = pts.r * pts.r;
    let max_cells = ((n as f64).sqrt().ceil() as usize).max(1);
    let cells = if pts.r > 0.0 {
        ((1.0 / pts.r).floor() as usize).clamp(1, max_cells)
    } else {
        max_cells
    };
    let side = 1.0 / cells as f64;
    let cell_of = |c: f64| ((c / side) as usize).min(cells - 1);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); cells * cells];
    for (i, &(x, y)) in pts.points.iter().enumerate() {
        buckets[cell_of(y) * cells + cell_of(x)].push(i as u32);
    }
    let mut edges = Vec::new();
    for cy in 0..cells {
        for cx in 0..cells {
            let here = &buckets[cy * cells + cx];
            for dy in 0..=1usize {
                for dx in -1i64..=1 {
                    // half-neighborhood: same cell, east, and the row below
                    if dy == 0 && dx < 0 {
                        continue;
                    }
                    let (ny, nx) = (cy + dy, cx as i64 + dx);
                    if ny >= cells || nx < 0 || nx >= cells as i64 {
                        continue;
                    }
                    let there = &buckets[ny * cells + nx as usize];
                    let same = dy == 0 && dx == 0;
                    for (a, &i) in here.iter().enumerate() {
                        let (xi, yi) = pts.points[i as usize];
                        let start = if same { a + 1 } else { 0 };
                        for &j in &there[start..] {
                            let (xj, yj) = pts.points[j as usize];
                            let (ddx, ddy) = (xi - xj, yi - yj);
                            if ddx * ddx + ddy * ddy <= r2 {
                                let (u, v) = (i.min(j) as usize, i.max(j) as usize);
                                edges.push((u, v));
                            }
                        }
                    }
                }
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Connectivity threshold radius `sqrt(ln n / (π n))`.
pub fn critical_radius(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("critical radius needs n >= 2"));
    }
    let n = n as f64;
    Ok((n.ln() / (std::f64::consts::PI * n)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Path,
    Grid,
    Torus,
}

/// `P_n`, the `m × n` grid `P_m □ P_n`, or the torus `C_m □ C_n`.
///
/// Grid vertex `(i, j)` has id `i * n + j`. `m` is ignored for paths.
pub fn gen_structured(kind: Structure, m: usize, n: usize) -> Result<Graph> {
    if n == 0 || (kind != Structure::Path && m == 0) {
        return Err(invalid("dimensions must be positive"));
    }
    match kind {
        Structure::Path => path(n),
        Structure::Grid => grid(m, n),
        Structure::Torus => torus(m, n),
    }
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn grid(m: usize, n: usize) -> Result<Graph> {
    let mut edges = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            let v = i * n + j;
            if j + 1 < n {
                edges.push((v, v + 1));
            }
            if i + 1 < m {
                edges.push((v, v + n));
            }
        }
    }
    Graph::from_edges(m * n, &edges)
}

pub fn torus(m: usize, n: usize) -> Result<Graph> {
    if m < 3 || n < 3 {
        return Err(invalid(format!("torus needs both sides >= 3, got {m} x {n}")));
    }
    let mut edges = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            let v = i * n + j;
            let right = i * n + (j + 1) % n;
            let down = ((i + 1) % m) * n + j;
            edges.push((v.min(right), v.max(right)));
            edges.push((v.min(down), v.max(down)));
        }
    }
    Graph::from_edges(m * n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(invalid("cycle needs n >= 3"));
    }
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    edges.push((0, n - 1));
    Graph::from_edges(n, &edges)
}

/// Star `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edges(leaves + 1, &edges)
}
