//! Order-independent accumulation and time grids.

use crate::search::RunResult;

const SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

/// Fixed-point sum with resolution 2^-64.
///
/// Each value is truncated to the grid before it is added, so the total does
/// not depend on the order in which values arrive. Values must be below 2^60.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactSum {
    raw: i128,
}

impl ExactSum {
    pub fn add(&mut self, v: f64) {
        debug_assert!(v.is_finite() && v.abs() < 2f64.powi(60), "value {v} out of range");
        self.raw += (v * SCALE) as i128;
    }

    pub fn merge(&mut self, other: &ExactSum) {
        self.raw += other.raw;
    }

    pub fn value(&self) -> f64 {
        self.raw as f64 / SCALE
    }

    pub fn mean(&self, count: usize) -> f64 {
        if count == 0 {
            f64::NAN
        } else {
            self.raw as f64 / SCALE / count as f64
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Mean and standard error of the mean, independent of input order.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().copied().collect::<ExactSum>().mean(count);
    if count < 2 {
        return (mean, f64::NAN);
    }
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    dev.sort_by(f64::total_cmp);
    let var = dev.iter().sum::<f64>() / (count - 1) as f64;
    (mean, (var / count as f64).sqrt())
}

/// `0` followed by `round(10^(j/per_decade))` for `j = 0, 1, …`, deduplicated,
/// up to and including `upper`.
pub fn log_time_grid(upper: u64, per_decade: usize) -> Vec<u64> {
    let mut grid = vec![0u64];
    let mut j = 0i32;
    loop {
        let t = 10f64.powf(j as f64 / per_decade as f64).round();
        if t > upper as f64 {
            break;
        }
        let t = t as u64;
        if *grid.last().unwrap() != t {
            grid.push(t);
        }
        j += 1;
    }
    if *grid.last().unwrap() != upper {
        grid.push(upper);
    }
    grid
}

/// Fraction of runs with `t* <= t` for each `t` in the grid. Censored runs
/// (`None`) count in the denominator only.
pub fn success_fraction(t_stars: &[Option<u64>], grid: &[u64]) -> Vec<f64> {
    let mut hits: Vec<u64> = t_stars.iter().flatten().copied().collect();
    hits.sort_unstable();
    grid.iter()
        .map(|&t| hits.partition_point(|&h| h <= t) as f64 / t_stars.len() as f64)
        .collect()
}

/// Running sums of `Φ_max(t) / Φ_global` over runs on one landscape.
#[derive(Debug, Clone)]
pub struct TraceAccumulator {
    grid: Vec<u64>,
    sums: Vec<ExactSum>,
    runs: usize,
}

impl TraceAccumulator {
    pub fn new(grid: Vec<u64>) -> Self {
        let sums = vec![ExactSum::default(); grid.len()];
        TraceAccumulator { grid, sums, runs: 0 }
    }

    pub fn add(&mut self, run: &RunResult, global: f64) {
        for (s, &t) in self.sums.iter_mut().zip(&self.grid) {
            s.add(run.best_trace.best_at(t) / global);
        }
        self.runs += 1;
    }

    pub fn merge(&mut self, other: &TraceAccumulator) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
        self.runs += other.runs;
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn grid(&self) -> &[u64] {
        &self.grid
    }

    /// Mean ratio per grid point.
    pub fn means(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s.mean(self.runs)).collect()
    }
}

/// `Φ_max/Φ_global` averaged over runs within each landscape, then over
/// landscapes. `per_landscape[i]` holds the runs on the landscape whose global
/// maximum fitness is `globals[i]`.
pub fn fitness_ratio_trace(per_landscape: &[Vec<RunResult>], globals: &[f64], grid: &[u64]) -> Vec<f64> {
    let mut across = vec![ExactSum::default(); grid.len()];
    let mut used = 0;
    for (runs, &global) in per_landscape.iter().zip(globals) {
        if runs.is_empty() {
            continue;
        }
        let mut acc = TraceAccumulator::new(grid.to_vec());
        for r in runs {
            acc.add(r, global);
        }
        for (s, m) in across.iter_mut().zip(acc.means()) {
            s.add(m);
        }
        used += 1;
    }
    across.iter().map(|s| s.mean(used)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_shape() {
        let g = log_time_grid(1000, 20);
        assert_eq!(&g[..6], &[0, 1, 2, 3, 4, 5]);
        assert_eq!(*g.last().unwrap(), 1000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        // 20 points per decade between 100 and 1000.
        assert_eq!(g.iter().filter(|&&t| t > 100 && t <= 1000).count(), 20);
        assert_eq!(log_time_grid(1, 20), vec![0, 1]);
        assert_eq!(*log_time_grid(37, 20).last().unwrap(), 37);
    }

    #[test]
    fn success_fraction_counts_censored_in_denominator() {
        let ts = [Some(1), Some(3), None, Some(3)];
        assert_eq!(success_fraction(&ts, &[0, 1, 2, 3, 100]), vec![0.0, 0.25, 0.25, 0.75, 0.75]);
        let all = [Some(2), Some(5)];
        assert_eq!(success_fraction(&all, &[5]), vec![1.0]);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        let (m, s) = mean_and_stderr(&[0.5; 10]);
        assert_eq!(m, 0.5);
        assert_eq!(s, 0.0);
        assert!(mean_and_stderr(&[1.0]).1.is_nan());
    }

    proptest! {
        #[test]
        fn exact_sum_is_order_independent(mut v in proptest::collection::vec(0.0f64..1000.0, 1..200), seed: u64) {
            let a: ExactSum = v.iter().copied().collect();
            // Deterministic shuffle.
            let mut s = seed | 1;
            for i in (1..v.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            let b: ExactSum = v.iter().copied().collect();
            prop_assert_eq!(a, b);
            let naive: f64 = v.iter().sum();
            prop_assert!((a.value() - naive).abs() <= 1e-9 * naive.max(1.0));
        }
    }
}
