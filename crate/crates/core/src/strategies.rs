//! Constructive burning schedules and closed-form lower bounds for paths,
//! grids and random geometric graphs.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::burn::{repair_schedule, simulate, BurnSchedule, Completion};
use crate::error::{invalid, Result};
use crate::generators::{grid, path, PointSet};
use crate::graph::Graph;
use crate::solver::greedy_cover;

/// `⌈√n⌉` in exact integer arithmetic.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s > n {
        s -= 1;
    }
    while s * s < n {
        s += 1;
    }
    s
}

/// Optimal schedule for `P_n`: `⌈√n⌉` balls of radii `k-1, …, 0` tiling the
/// path, packed against the right end so that only the largest ball can
/// overhang.
pub fn path_schedule(n: usize) -> Result<BurnSchedule> {
    if n == 0 {
        return Err(invalid("path needs at least one vertex"));
    }
    let k = ceil_sqrt(n as u64) as usize;
    let mut centers = vec![0; k];
    let mut right = n as isize - 1;
    for rho in 0..k {
        let c = (right - rho as isize).max(0);
        centers[k - 1 - rho] = c as usize;
        right = c - rho as isize - 1;
    }
    Ok(BurnSchedule::strict(centers))
}

/// Largest `k >= 0` with `k(2k²+1)/3 < mn`, i.e. with fewer than `mn`
/// vertices in balls of radii `0..k` of the infinite grid.
pub fn grid_ball_inversion(m: usize, n: usize) -> usize {
    let target = (m as u128) * (n as u128);
    let f = |k: u128| k * (2 * k * k + 1) / 3;
    let mut k = 0u128;
    while f(k + 1) < target {
        k += 1;
    }
    k as usize
}

/// `max(k* + 1, ⌈√max(m,n)⌉)` where `k*` is [`grid_ball_inversion`].
pub fn grid_lower_bound(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(invalid("grid dimensions must be positive"));
    }
    let long = m.max(n);
    Ok((grid_ball_inversion(m, n) + 1).max(ceil_sqrt(long as u64) as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridRegime {
    Wide,
    Narrow,
}

/// `m <= ⌈√n⌉` (with `m <= n`) counts as narrow.
pub fn grid_regime(m: usize, n: usize) -> GridRegime {
    let (m, n) = (m.min(n), m.max(n));
    if m as u64 <= ceil_sqrt(n as u64) {
        GridRegime::Narrow
    } else {
        GridRegime::Wide
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPlan {
    /// Normalized dimensions, `m <= n`.
    pub m: usize,
    pub n: usize,
    /// Input had more rows than columns; `schedule` uses the input layout.
    pub transposed: bool,
    pub regime: GridRegime,
    pub gamma: f64,
    pub k1: f64,
    pub k2: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub strips: usize,
    /// Balls added by the greedy fill after the strip layout.
    pub repair_balls: usize,
    pub target_rounds: usize,
    pub schedule: BurnSchedule,
    pub achieved_rounds: Completion,
    pub lower_bound: usize,
    pub within_k2: bool,
}

fn grid_constants(m: usize, n: usize, c: f64) -> (f64, f64, f64) {
    let mn = (m * n) as f64;
    let gamma = m as f64 / (n as f64).sqrt();
    let k1 = mn.cbrt() / gamma.powf(1.0 / 6.0);
    let k2 = 1.5f64.cbrt() * mn.cbrt() * (1.0 + c / gamma.powf(1.0 / 6.0));
    (gamma, k1, k2)
}

/// Map normalized `(i, j)` ids back to the caller's layout.
fn untranspose(ids: &mut [usize], m: usize, n: usize) {
    // normalized grid is m x n; the caller's is n x m
    for v in ids.iter_mut() {
        let (i, j) = (*v / n, *v % n);
        *v = j * m + i;
    }
}

/// Diagonal-strip construction for `P_m □ P_n`; narrow grids go to
/// [`grid_narrow_schedule`].
pub fn grid_strip_schedule(m: usize, n: usize, c: f64) -> Result<GridPlan> {
    if m == 0 || n == 0 {
        return Err(invalid("grid dimensions must be positive"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid(format!("slack C must be positive, got {c}")));
    }
    if grid_regime(m, n) == GridRegime::Narrow {
        let mut plan = grid_narrow_schedule(m, n)?;
        plan.c = c;
        plan.k2 = grid_constants(plan.m, plan.n, c).2;
        plan.within_k2 = within(plan.achieved_rounds, plan.k2);
        return Ok(plan);
    }
    let transposed = m > n;
    let (m, n) = (m.min(n), m.max(n));
    let (gamma, k1, k2) = grid_constants(m, n, c);
    let g = grid(m, n)?;

    // Rotated coordinates u = i + j, w = j - i. A ball of radius ρ is the
    // square |Δu| <= ρ, |Δw| <= ρ (restricted to u ≡ w mod 2). Strips are
    // bands of w starting at the top-right corner (w = n-1) and moving
    // toward the bottom-left corner (w = -(m-1)); inside a band, balls are
    // stacked along u with radii growing by one.
    let (mi, ni) = (m as i64, n as i64);
    let w_min = -(mi - 1);
    let u_lo = |w: i64| w.abs();
    let u_hi = |w: i64| (2 * (mi - 1) + w).min(2 * (ni - 1) - w);
    let mut balls: Vec<(usize, usize)> = Vec::new(); // (vertex, radius)
    let first_radius = k1.ceil() as i64;
    let mut rho = first_radius;
    let mut w_top = ni - 1 + rho;
    let mut strips = 0;
    while w_top >= w_min {
        strips += 1;
        let w_c = (w_top - rho).max(w_min);
        let w_bottom = w_c - rho;
        let (a, b) = (w_bottom.max(w_min), w_top.min(ni - 1));
        let u_first = if a <= 0 && 0 <= b { 0 } else { u_lo(a).min(u_lo(b)) };
        let u_last = u_hi((ni - mi).clamp(a, b));
        let mut next_u = u_first;
        loop {
            let mut u_c = next_u + rho;
            if (u_c - w_c).rem_euclid(2) != 0 {
                u_c -= 1;
            }
            u_c = u_c.clamp(u_lo(w_c), u_hi(w_c));
            let (i, j) = ((u_c - w_c) / 2, (u_c + w_c) / 2);
            balls.push(((i * ni + j) as usize, rho as usize));
            next_u = (u_c + rho + 1).max(next_u + 1);
            rho += 1;
            if next_u > u_last {
                break;
            }
        }
        w_top = w_bottom - 1;
    }
    let max_radius = (rho - 1) as usize;

    let mut covered = BitSet::new(m * n);
    for &(v, r) in &balls {
        mark_diamond(&mut covered, m, n, v / n, v % n, r);
    }
    let mut uncovered = BitSet::full(m * n);
    uncovered.difference_with(&covered);

    let mut target = max_radius + 1;
    let mut slots: Vec<Option<usize>> = vec![None; target];
    for &(v, r) in &balls {
        slots[target - 1 - r] = Some(v);
    }
    let mut repair_balls = 0;
    if !uncovered.is_empty() {
        loop {
            let free: Vec<usize> = (0..target).filter(|&s| slots[s].is_none()).collect();
            let radii: Vec<usize> = free.iter().map(|&s| target - 1 - s).collect();
            let mut left = uncovered.clone();
            let chosen = greedy_cover(&g, &mut left, &radii);
            if left.is_empty() {
                repair_balls = chosen.len();
                for (s, v) in free.into_iter().zip(chosen) {
                    slots[s] = Some(v);
                }
                break;
            }
            target += 1;
            slots.insert(0, None);
        }
    }
    let centers: Vec<usize> = slots.into_iter().map(|s| s.unwrap_or(0)).collect();
    let mut schedule = repair_schedule(&g, &centers)?;
    let achieved_rounds = simulate(&g, &schedule)?.completion;
    if transposed {
        untranspose(&mut schedule.sources, m, n);
    }
    Ok(GridPlan {
        m,
        n,
        transposed,
        regime: GridRegime::Wide,
        gamma,
        k1,
        k2,
        c,
        strips,
        repair_balls,
        target_rounds: target,
        schedule,
        achieved_rounds,
        lower_bound: grid_lower_bound(m, n)?,
        within_k2: within(achieved_rounds, k2),
    })
}

fn within(done: Completion, k2: f64) -> bool {
    matches!(done, Completion::Round(t) if t as f64 <= k2.floor() + 1.0)
}

fn mark_diamond(set: &mut BitSet, m: usize, n: usize, ci: usize, cj: usize, r: usize) {
    for i in ci.saturating_sub(r)..=(ci + r).min(m - 1) {
        let span = r - i.abs_diff(ci);
        for j in cj.saturating_sub(span)..=(cj + span).min(n - 1) {
            set.insert(i * n + j);
        }
    }
}

/// Ignitions every `⌈√n⌉` columns along the top border row.
pub fn grid_narrow_schedule(m: usize, n: usize) -> Result<GridPlan> {
    if m == 0 || n == 0 {
        return Err(invalid("grid dimensions must be positive"));
    }
    if grid_regime(m, n) != GridRegime::Narrow {
        return Err(invalid(format!("{m}x{n} grid is not narrow")));
    }
    let transposed = m > n;
    let (m, n) = (m.min(n), m.max(n));
    let (gamma, k1, k2) = grid_constants(m, n, 1.0);
    let s = ceil_sqrt(n as u64) as usize;
    let g = grid(m, n)?;
    let mut schedule = if m == 1 {
        path_schedule(n)?
    } else {
        let sites: Vec<usize> = (0..n.div_ceil(s)).map(|k| (k * s + s / 2).min(n - 1)).collect();
        repair_schedule(&g, &sites)?
    };
    let achieved_rounds = simulate(&g, &schedule)?.completion;
    let target_rounds = achieved_rounds.round().unwrap_or(0);
    if transposed {
        untranspose(&mut schedule.sources, m, n);
    }
    Ok(GridPlan {
        m,
        n,
        transposed,
        regime: GridRegime::Narrow,
        gamma,
        k1,
        k2,
        c: 1.0,
        strips: 0,
        repair_balls: 0,
        target_rounds,
        schedule,
        achieved_rounds,
        lower_bound: grid_lower_bound(m, n)?,
        within_k2: within(achieved_rounds, k2),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellPlan {
    pub a: f64,
    pub side: f64,
    /// Cells per axis; the last row and column absorb the remainder.
    pub cells_per_axis: usize,
    /// Occupancy counts, row-major by `(y cell, x cell)`.
    pub cells: Vec<usize>,
    pub ignitions: Vec<usize>,
    pub schedule: BurnSchedule,
    pub achieved_rounds: Completion,
}

pub const DEFAULT_CELL_COEFFICIENT: f64 = 0.5;

/// Tessellate the unit square into cells of side `a·r^{1/3}`, light the
/// point nearest each nonempty cell's center (row-major), then let the fire
/// spread to completion.
pub fn rgg_cell_schedule(g: &Graph, pts: &PointSet, a: f64) -> Result<CellPlan> {
    if pts.is_empty() {
        return Err(invalid("empty point set"));
    }
    if pts.len() != g.n() {
        return Err(invalid(format!("{} points for a graph on {} vertices", pts.len(), g.n())));
    }
    let side = a * pts.r.cbrt();
    if !(side > 0.0 && side <= 1.0) {
        return Err(invalid(format!("cell side {side} must lie in (0, 1]")));
    }
    let q = ((1.0 / side).floor() as usize).max(1);
    let cell_of = |x: f64| ((x / side) as usize).min(q - 1);
    let bounds = |c: usize| {
        let lo = c as f64 * side;
        let hi = if c == q - 1 { 1.0 } else { (c + 1) as f64 * side };
        (lo + hi) / 2.0
    };
    let mut cells = vec![0usize; q * q];
    let mut best: Vec<Option<(f64, usize)>> = vec![None; q * q];
    for (v, &(x, y)) in pts.points.iter().enumerate() {
        let (cx, cy) = (cell_of(x), cell_of(y));
        let idx = cy * q + cx;
        cells[idx] += 1;
        let d = (x - bounds(cx)).powi(2) + (y - bounds(cy)).powi(2);
        // ids arrive in increasing order, so strict < keeps the smallest on ties
        if best[idx].is_none_or(|(bd, _)| d < bd) {
            best[idx] = Some((d, v));
        }
    }
    let ignitions: Vec<usize> = best.iter().flatten().map(|&(_, v)| v).collect();
    let schedule = repair_schedule(g, &ignitions)?;
    let achieved_rounds = simulate(g, &schedule)?.completion;
    Ok(CellPlan {
        a,
        side,
        cells_per_axis: q,
        cells,
        ignitions,
        schedule,
        achieved_rounds,
    })
}

pub const DEFAULT_C0: f64 = 400.0;

/// Asymptotic (a.a.s.) statement `b > t`, not a per-instance proof.
#[derive(Debug, Clone, Serialize)]
pub struct RggBound {
    pub r: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub t: usize,
    pub claim_at_least: usize,
    pub asymptotic: bool,
}

pub fn rgg_lower_bound(r: f64, c0: f64) -> Result<RggBound> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(invalid(format!("C0 must be positive, got {c0}")));
    }
    let t = (2.0 / (c0 * std::f64::consts::PI * r * r)).cbrt().floor() as usize;
    Ok(RggBound {
        r,
        c0,
        t,
        claim_at_least: t + 1,
        asymptotic: true,
    })
}

/// Engine-verified length of [`path_schedule`] on `P_n`.
pub fn path_schedule_rounds(n: usize) -> Result<Completion> {
    Ok(simulate(&path(n)?, &path_schedule(n)?)?.completion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_rgg;

    #[test]
    fn ceil_sqrt_exact() {
        for n in 0..10_000u64 {
            let s = ceil_sqrt(n);
            assert!(s * s >= n && (s == 0 || (s - 1) * (s - 1) < n), "{n}");
        }
        assert_eq!(ceil_sqrt(u32::MAX as u64 * 4), 131_072);
    }

    #[test]
    fn path_schedule_examples() {
        assert_eq!(path_schedule(1).unwrap().sources, vec![0]);
        assert_eq!(path_schedule(9).unwrap().sources, vec![2, 6, 8]);
        assert_eq!(path_schedule(100).unwrap().len(), 10);
        for n in 1..=300 {
            let k = ceil_sqrt(n as u64) as usize;
            assert_eq!(path_schedule(n).unwrap().len(), k);
            assert_eq!(path_schedule_rounds(n).unwrap(), Completion::Round(k), "n={n}");
        }
    }

    #[test]
    fn grid_lower_bound_examples() {
        assert_eq!(grid_lower_bound(10, 10).unwrap(), 6);
        assert_eq!(grid_lower_bound(2, 2).unwrap(), 2);
        assert_eq!(grid_lower_bound(1, 100).unwrap(), 10);
        assert_eq!(grid_ball_inversion(10, 10), 5);
    }

    #[test]
    fn strip_and_narrow_examples() {
        let p = grid_strip_schedule(10, 10, 1.0).unwrap();
        assert_eq!(p.regime, GridRegime::Wide);
        assert!(p.achieved_rounds.round().unwrap() >= 6);
        let p = grid_strip_schedule(1, 100, 1.0).unwrap();
        assert_eq!(p.regime, GridRegime::Narrow);
        assert_eq!(p.achieved_rounds, Completion::Round(10));
        let p = grid_narrow_schedule(2, 4).unwrap();
        assert!(p.achieved_rounds.round().unwrap() >= 2);
        let p = grid_narrow_schedule(5, 100).unwrap();
        assert_eq!(p.schedule.len(), 10);
        assert!(p.achieved_rounds.round().unwrap() <= 30);
        assert!(grid_narrow_schedule(20, 20).is_err());
    }

    #[test]
    fn transposed_schedule_burns_input_layout() {
        for (m, n) in [(13, 7), (40, 3), (12, 11)] {
            let p = grid_strip_schedule(m, n, 1.0).unwrap();
            assert!(p.transposed);
            let t = simulate(&grid(m, n).unwrap(), &p.schedule).unwrap();
            assert_eq!(t.completion, p.achieved_rounds);
        }
    }

    #[test]
    fn rgg_bound_examples() {
        let b = rgg_lower_bound(0.01, DEFAULT_C0).unwrap();
        assert_eq!((b.t, b.claim_at_least), (2, 3));
        assert_eq!(rgg_lower_bound(0.04, DEFAULT_C0).unwrap().t, 0);
        assert!(rgg_lower_bound(0.01, 800.0).unwrap().t <= b.t);
        assert!(rgg_lower_bound(0.0, DEFAULT_C0).is_err());
    }

    #[test]
    fn cell_schedule_single_cell() {
        let (g, pts) = gen_rgg(60, 0.5, 3).unwrap();
        assert!(g.is_connected());
        // cell side 0.9: a single cell
        let plan = rgg_cell_schedule(&g, &pts, 0.9 / pts.r.cbrt()).unwrap();
        assert_eq!(plan.cells_per_axis, 1);
        assert_eq!(plan.ignitions.len(), 1);
        let ecc = g.eccentricity(plan.ignitions[0]).unwrap().finite().unwrap() as usize;
        assert_eq!(plan.achieved_rounds, Completion::Round(1 + ecc));
    }

    #[test]
    fn cell_schedule_disconnected_is_incomplete() {
        let (g, pts) = gen_rgg(200, 0.01, 9).unwrap();
        assert!(!g.is_connected());
        let plan = rgg_cell_schedule(&g, &pts, 0.5).unwrap();
        assert_eq!(plan.achieved_rounds, Completion::Incomplete);
        assert!(rgg_cell_schedule(&g, &pts.subset(&[]), 0.5).is_err());
    }
}
