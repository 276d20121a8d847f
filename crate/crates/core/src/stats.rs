//! Order-independent summary statistics for integer samples.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub stddev: f64,
    pub min: u64,
    pub max: u64,
    /// Half-width of the normal-approximation 95% interval for the mean.
    pub ci95: f64,
}

impl Summary {
    /// Mean and sample standard deviation from exact integer sums, so the
    /// result does not depend on the order of `xs`.
    pub fn of(xs: &[u64]) -> Option<Summary> {
        if xs.is_empty() {
            return None;
        }
        let k = xs.len() as u128;
        let s: u128 = xs.iter().map(|&x| x as u128).sum();
        let s2: u128 = xs.iter().map(|&x| (x as u128) * (x as u128)).sum();
        let mean = s as f64 / k as f64;
        let var = if k > 1 {
            // k Σx² - (Σx)² is exact in integers
            (k * s2 - s * s) as f64 / (k * (k - 1)) as f64
        } else {
            0.0
        };
        let stddev = var.max(0.0).sqrt();
        Some(Summary {
            count: xs.len(),
            mean,
            stddev,
            min: *xs.iter().min().unwrap(),
            max: *xs.iter().max().unwrap(),
            ci95: 1.96 * stddev / (k as f64).sqrt(),
        })
    }
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[u64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    sorted[lo] as f64 + frac * (sorted[hi] as f64 - sorted[lo] as f64)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_values() {
        let s = Summary::of(&[2, 4, 4, 4, 5, 5, 7, 9]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.stddev - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max), (2, 9));
        let one = Summary::of(&[3]).unwrap();
        assert_eq!((one.mean, one.stddev, one.ci95), (3.0, 0.0, 0.0));
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn order_independent() {
        let mut xs: Vec<u64> = (0..1000).map(|i| (i * 7919) % 1013).collect();
        let a = Summary::of(&xs).unwrap();
        xs.reverse();
        assert_eq!(a, Summary::of(&xs).unwrap());
    }

    #[test]
    fn quantiles() {
        let xs = [1, 2, 3, 4, 5];
        assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 5.0);
        assert_eq!(quantile_sorted(&xs, 0.1), 1.4);
    }
}
