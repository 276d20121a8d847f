//! Closed-form predictions at finite size, and an empirical profile of
//! neighborhood growth to compare against them.

use serde::Serialize;

use crate::drunk::DrunkVariant;
use crate::error::{invalid, Result};
use crate::graph::{Bfs, Graph};
use crate::rng::SplitMix64;
use crate::strategies::{grid_ball_inversion, grid_lower_bound, grid_regime, GridRegime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GnpCase {
    /// `p` above the dense window: `b = 2`.
    Dense,
    /// Inside the dense window: `b ∈ {2, 3}`.
    DenseWindow,
    /// `d^{i-1}/n >= (1+ε) ln n`: `b = i`.
    Exact,
    /// `(1-ε) ln d <= d^{i-1}/n < (1+ε) ln n`: `b ∈ {i, i+1}`.
    Ambiguous,
    /// `d^{i-1}/n < (1-ε) ln d`: `b = i + 1`.
    Shifted,
    /// `d < ln n`; the prediction does not apply.
    OutOfRegime,
}

#[derive(Debug, Clone, Serialize)]
pub struct GnpPrediction {
    pub n: usize,
    pub p: f64,
    pub d: f64,
    pub eps: f64,
    pub delta: f64,
    pub omega: f64,
    pub dense_lower: f64,
    pub dense_upper: f64,
    pub i: Option<usize>,
    /// `d^i/n - (2 ln n + δ)` for the selected `i`.
    pub margin: Option<f64>,
    /// `d^{i-1}/n`.
    pub ratio: Option<f64>,
    pub case: GnpCase,
    pub predicted: Vec<usize>,
}

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_DELTA: f64 = 1.0;

pub fn predict_gnp(n: usize, p: f64, eps: f64, delta: f64) -> Result<GnpPrediction> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    if n < 3 {
        return Err(invalid("prediction needs n >= 3"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let lnln = ln_n.ln();
    let omega = lnln.sqrt();
    let d = p * (nf - 1.0);
    let dense_lower = 1.0 - (ln_n + lnln + omega) / nf;
    let dense_upper = 1.0 - (ln_n + lnln - omega) / nf;
    let mut out = GnpPrediction {
        n,
        p,
        d,
        eps,
        delta,
        omega,
        dense_lower,
        dense_upper,
        i: None,
        margin: None,
        ratio: None,
        case: GnpCase::OutOfRegime,
        predicted: Vec::new(),
    };
    if p > dense_upper {
        out.case = GnpCase::Dense;
        out.predicted = vec![2];
        return Ok(out);
    }
    if p > dense_lower {
        out.case = GnpCase::DenseWindow;
        out.predicted = vec![2, 3];
        return Ok(out);
    }
    if d < ln_n {
        return Ok(out);
    }
    // smallest i >= 2 with d^i/n >= 2 ln n + δ, compared in logs
    let goal = (2.0 * ln_n + delta).ln();
    let mut i = 2usize;
    while (i as f64) * d.ln() - ln_n < goal {
        i += 1;
    }
    let ratio = ((i - 1) as f64 * d.ln() - ln_n).exp();
    out.i = Some(i);
    out.margin = Some(((i as f64) * d.ln() - ln_n).exp() - (2.0 * ln_n + delta));
    out.ratio = Some(ratio);
    (out.case, out.predicted) = if ratio >= (1.0 + eps) * ln_n {
        (GnpCase::Exact, vec![i])
    } else if ratio >= (1.0 - eps) * d.ln() {
        (GnpCase::Ambiguous, vec![i, i + 1])
    } else {
        (GnpCase::Shifted, vec![i + 1])
    };
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPrediction {
    pub m: usize,
    pub n: usize,
    /// `(3/2)^{1/3} (mn)^{1/3}`.
    pub leading: f64,
    pub regime: GridRegime,
    /// `(3mn/2)^{1/3} - 1`.
    pub k0: f64,
    /// Largest `k` with `k(2k²+1)/3 < mn`.
    pub k_star: usize,
    pub lower: usize,
}

pub fn predict_grid(m: usize, n: usize) -> Result<GridPrediction> {
    let lower = grid_lower_bound(m, n)?;
    let (m, n) = (m.min(n), m.max(n));
    let mn = (m * n) as f64;
    Ok(GridPrediction {
        m,
        n,
        leading: 1.5f64.cbrt() * mn.cbrt(),
        regime: grid_regime(m, n),
        k0: (1.5 * mn).cbrt() - 1.0,
        k_star: grid_ball_inversion(m, n),
        lower,
    })
}

/// Upper constant `K` for the variant-3 interval `[√n, K√n]`, fixed from
/// pilot runs on paths of 10⁴ to 1.6·10⁵ vertices (observed ratio ≈ 1.55).
pub const UNBURNED_PATH_K: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathDrunkPrediction {
    Point { value: f64 },
    Interval { lo: f64, hi: f64 },
}

pub fn predict_path_drunk(n: usize, variant: DrunkVariant) -> Result<PathDrunkPrediction> {
    if n < 2 {
        return Err(invalid("prediction needs n >= 2"));
    }
    let nf = n as f64;
    Ok(match variant {
        DrunkVariant::UniformAll | DrunkVariant::UniformUnselected => PathDrunkPrediction::Point {
            value: (nf * nf.ln() / 2.0).sqrt(),
        },
        DrunkVariant::UniformUnburned => PathDrunkPrediction::Interval {
            lo: nf.sqrt(),
            hi: UNBURNED_PATH_K * nf.sqrt(),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub j: usize,
    /// Mean of `|N(v,j)| / d^j`.
    pub ball_ratio: f64,
    /// Mean of `|S(v,j)| / d^j`.
    pub sphere_ratio: f64,
    /// Mean of `|N(v,j)| / |S(v,j)|`.
    pub ball_over_sphere: f64,
    /// Some sampled ball already spans its whole component.
    pub saturated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighborhoodProfile {
    pub d_nominal: f64,
    pub vertices: Vec<usize>,
    pub rows: Vec<ProfileRow>,
    /// Rows stop at the first saturated radius below `max_j`.
    pub truncated: bool,
}

/// Ball and sphere growth around `sample` distinct random vertices.
pub fn neighborhood_profile(g: &Graph, d_nominal: f64, sample: usize, max_j: usize, seed: u64) -> Result<NeighborhoodProfile> {
    if d_nominal.is_nan() || d_nominal <= 1.0 {
        return Err(invalid(format!("nominal degree must exceed 1, got {d_nominal}")));
    }
    if sample == 0 || max_j == 0 {
        return Err(invalid("sample and max_j must be positive"));
    }
    let n = g.n();
    let mut rng = SplitMix64::new(seed);
    let mut vertices = Vec::with_capacity(sample.min(n));
    let mut taken = std::collections::HashSet::new();
    while vertices.len() < sample.min(n) {
        let v = rng.below_usize(n);
        if taken.insert(v) {
            vertices.push(v);
        }
    }
    // layer sizes |S(v, j)| for j = 0..=max_j, and component sizes
    let mut bfs = Bfs::new(n);
    let layers: Vec<(Vec<usize>, usize)> = vertices
        .iter()
        .map(|&v| {
            let mut sizes = vec![0usize; max_j + 1];
            let comp = bfs.visit_within(g, v, usize::MAX, |_, d| {
                if (d as usize) <= max_j {
                    sizes[d as usize] += 1;
                }
            });
            (sizes, comp)
        })
        .collect();
    let mut rows = Vec::new();
    let mut truncated = false;
    let k = vertices.len() as f64;
    for j in 1..=max_j {
        let (mut br, mut sr, mut bs) = (0.0, 0.0, 0.0);
        let mut saturated = false;
        let dj = d_nominal.powi(j as i32);
        for (sizes, comp) in &layers {
            let ball: usize = sizes[..=j].iter().sum();
            let sphere = sizes[j];
            saturated |= ball == *comp;
            br += ball as f64 / dj;
            sr += sphere as f64 / dj;
            bs += if sphere > 0 { ball as f64 / sphere as f64 } else { f64::INFINITY };
        }
        rows.push(ProfileRow {
            j,
            ball_ratio: br / k,
            sphere_ratio: sr / k,
            ball_over_sphere: bs / k,
            saturated,
        });
        if saturated {
            truncated = j < max_j;
            break;
        }
    }
    Ok(NeighborhoodProfile {
        d_nominal,
        vertices,
        rows,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, path};

    fn gnp(n: usize, p: f64) -> GnpPrediction {
        predict_gnp(n, p, DEFAULT_EPS, DEFAULT_DELTA).unwrap()
    }

    #[test]
    fn gnp_examples() {
        let a = gnp(3000, 0.1);
        assert_eq!((a.i, a.case, a.predicted.clone()), (Some(2), GnpCase::Shifted, vec![3]));
        let b = gnp(1000, 0.995);
        assert_eq!((b.case, b.predicted), (GnpCase::Dense, vec![2]));
        assert!((1.0 - b.dense_upper - 0.00745).abs() < 1e-5);
        assert_eq!(gnp(3000, 0.001).case, GnpCase::OutOfRegime);
        let c = gnp(20000, 80.0 / 19999.0);
        assert_eq!((c.i, c.predicted), (Some(3), vec![4]));
        assert!(predict_gnp(100, 1.0, 0.1, 1.0).is_err());
        assert!(predict_gnp(100, 0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn gnp_i_monotone_in_p() {
        let n = 5000;
        let mut last = usize::MAX;
        for k in 1..200 {
            let p = k as f64 / 400.0;
            if let Some(i) = gnp(n, p).i {
                assert!(i <= last);
                last = i;
            }
        }
    }

    #[test]
    fn grid_examples() {
        let g = predict_grid(100, 100).unwrap();
        assert!((g.leading - 24.662).abs() < 1e-3);
        assert_eq!(g.regime, GridRegime::Wide);
        let p = predict_grid(1, 400).unwrap();
        assert_eq!((p.regime, p.lower), (GridRegime::Narrow, 20));
        assert_eq!(predict_grid(10, 10).unwrap().lower, 6);
    }

    #[test]
    fn path_drunk_examples() {
        match predict_path_drunk(1_000_000, DrunkVariant::UniformAll).unwrap() {
            PathDrunkPrediction::Point { value } => assert_eq!((value).round(), 2628.0),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            predict_path_drunk(4, DrunkVariant::UniformUnburned).unwrap(),
            PathDrunkPrediction::Interval { lo: 2.0, hi: 4.0 }
        );
        assert_eq!(
            predict_path_drunk(999, DrunkVariant::UniformAll).unwrap(),
            predict_path_drunk(999, DrunkVariant::UniformUnselected).unwrap()
        );
    }

    #[test]
    fn profile_complete_graph() {
        let g = complete(30).unwrap();
        let prof = neighborhood_profile(&g, 29.0, 5, 3, 1).unwrap();
        assert_eq!(prof.rows.len(), 1);
        assert!(prof.truncated);
        assert_eq!(prof.rows[0].sphere_ratio, 1.0);
        assert!((prof.rows[0].ball_ratio - 30.0 / 29.0).abs() < 1e-12);
    }

    #[test]
    fn profile_path_growth() {
        let g = path(1001).unwrap();
        let prof = neighborhood_profile(&g, 2.0, 1, 3, 0).unwrap();
        assert!(!prof.truncated);
        assert_eq!(prof.rows.len(), 3);
    }
}
