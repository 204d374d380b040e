//! Closed-form blind-search baselines and least-squares scaling fits.
//!
//! Blind search with `M` independent agents, each hitting a global maximum
//! with probability `p` per trial, halts at a geometric time with success
//! probability `1 - (1-p)^M`. Powers of `1-p` are evaluated as
//! `exp(k·ln1p(-p))` so that `p ~ 2^-30` keeps full precision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{Family, LandscapeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindSearchModel {
    /// Per-trial probability of drawing a global maximum.
    pub p: f64,
    /// Number of independent agents.
    pub m: usize,
}

impl BlindSearchModel {
    pub fn new(p: f64, m: usize) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param(format!("success probability p={p} outside (0, 1]")));
        }
        if m == 0 {
            return Err(Error::param("population size must be at least 1"));
        }
        Ok(BlindSearchModel { p, m })
    }

    /// Landscape with a unique maximum: `p = 2^-n`.
    pub fn single(n: usize, m: usize) -> Result<Self> {
        Self::new(2f64.powi(-(n as i32)), m)
    }

    /// Two degenerate maxima (ferromagnetic chain): `p = 2^-(n-1)`.
    pub fn degenerate(n: usize, m: usize) -> Result<Self> {
        Self::new(2f64.powi(1 - n as i32), m)
    }

    pub fn for_spec(spec: &LandscapeSpec, m: usize) -> Result<Self> {
        match spec.family {
            Family::IsingFerromagnetic => Self::degenerate(spec.n, m),
            _ => Self::single(spec.n, m),
        }
    }

    fn ln_miss(&self) -> f64 {
        (-self.p).ln_1p()
    }

    /// Probability that a whole generation misses: `(1-p)^M`.
    fn generation_miss(&self) -> f64 {
        (self.m as f64 * self.ln_miss()).exp()
    }

    /// `1 - (1-p)^M`.
    pub fn generation_success(&self) -> f64 {
        -(self.m as f64 * self.ln_miss()).exp_m1()
    }

    /// `P(t* = t) = [1-(1-p)^M] (1-p)^{M(t-1)}`.
    pub fn halting_pmf(&self, t: u64) -> Result<f64> {
        if t < 1 {
            return Err(Error::param("halting time starts at t = 1"));
        }
        if self.p == 1.0 {
            return Ok(if t == 1 { 1.0 } else { 0.0 });
        }
        let tail = (self.m as f64 * (t - 1) as f64 * self.ln_miss()).exp();
        Ok(self.generation_success() * tail)
    }

    /// `<t*> = 1 / [1-(1-p)^M]`.
    pub fn mean_halting_time(&self) -> f64 {
        1.0 / self.generation_success()
    }

    /// `π_M(t) = 1 - (1-p)^{Mt}`; accepts any real `t >= 0`, including infinity.
    pub fn success_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if self.p == 1.0 || t.is_infinite() {
            return 1.0;
        }
        -(self.m as f64 * t * self.ln_miss()).exp_m1()
    }

    /// `<C> = M <t*> / 2^n`.
    pub fn mean_cost(&self, n: usize) -> f64 {
        self.m as f64 * self.mean_halting_time() / 2f64.powi(n as i32)
    }

    /// Variance of the halting time (geometric law).
    pub fn halting_variance(&self) -> f64 {
        let s = self.generation_success();
        self.generation_miss() / (s * s)
    }
}

/// Cost of a greedy walk from a random string on a single-peak additive
/// landscape: `N/2` strictly improving flips, normalized by `2^N`.
pub fn greedy_cost(n: usize) -> f64 {
    n as f64 / 2f64.powi(n as i32 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingModel {
    /// `a N + b N ln N`
    NLogN,
    /// `a N + b`
    Linear,
    /// `c N²`
    Quadratic,
    /// `c e^{γN}`, fitted as a line in `ln y`.
    Exponential,
}

impl ScalingModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingModel::NLogN => "n-log-n",
            ScalingModel::Linear => "linear",
            ScalingModel::Quadratic => "quadratic",
            ScalingModel::Exponential => "exponential",
        }
    }

    pub fn eval(&self, coefficients: &[f64], n: f64) -> f64 {
        match self {
            ScalingModel::NLogN => coefficients[0] * n + coefficients[1] * n * n.ln(),
            ScalingModel::Linear => coefficients[0] * n + coefficients[1],
            ScalingModel::Quadratic => coefficients[0] * n * n,
            ScalingModel::Exponential => coefficients[0] * (coefficients[1] * n).exp(),
        }
    }
}

impl fmt::Display for ScalingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ScalingModel::NLogN, ScalingModel::Linear, ScalingModel::Quadratic, ScalingModel::Exponential]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown scaling model {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    /// `[a, b]` for the two-term models, `[c]` for quadratic, `[c, γ]` for exponential.
    pub coefficients: Vec<f64>,
    /// Coefficient of determination, clamped to `[0, 1]`. For the exponential
    /// model it is computed on `ln y`.
    pub r_squared: f64,
}

impl ScalingFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.model.eval(&self.coefficients, n)
    }
}

/// Ordinary least squares of `y` on the given basis columns (no intercept
/// unless a column of ones is supplied).
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = columns.len();
    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            gram[i][j] = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
        }
        rhs[i] = columns[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    match p {
        1 => {
            if gram[0][0] <= 0.0 {
                return Err(Error::Fit("degenerate design matrix".into()));
            }
            Ok(vec![rhs[0] / gram[0][0]])
        }
        2 => {
            let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
            let scale = gram[0][0] * gram[1][1];
            if !(det.abs() > 1e-12 * scale) {
                return Err(Error::Fit("degenerate design matrix".into()));
            }
            Ok(vec![
                (rhs[0] * gram[1][1] - rhs[1] * gram[0][1]) / det,
                (gram[0][0] * rhs[1] - gram[1][0] * rhs[0]) / det,
            ])
        }
        _ => unreachable!("at most two basis functions"),
    }
}

fn r_squared(y: &[f64], fitted: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fitted).map(|(v, f)| (v - f).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Least-squares fit of `y(N)` to one of the scaling models.
pub fn fit_scaling(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::param("a scaling fit needs at least 3 points"));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("scaling fit needs distinct N values"));
    }
    if points.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return Err(Error::param("scaling fit needs positive N and finite y"));
    }

    let n: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (coefficients, r2) = match model {
        ScalingModel::NLogN | ScalingModel::Linear | ScalingModel::Quadratic => {
            let columns = match model {
                ScalingModel::NLogN => vec![n.clone(), n.iter().map(|v| v * v.ln()).collect()],
                ScalingModel::Linear => vec![n.clone(), vec![1.0; n.len()]],
                _ => vec![n.iter().map(|v| v * v).collect()],
            };
            let c = least_squares(&columns, &y)?;
            let fitted: Vec<f64> = n.iter().map(|&v| model.eval(&c, v)).collect();
            let r2 = r_squared(&y, &fitted);
            (c, r2)
        }
        ScalingModel::Exponential => {
            if y.iter().any(|v| *v <= 0.0) {
                return Err(Error::param("exponential fit needs positive y"));
            }
            let ln_y: Vec<f64> = y.iter().map(|v| v.ln()).collect();
            let c = least_squares(&[vec![1.0; n.len()], n.clone()], &ln_y)?;
            let fitted: Vec<f64> = n.iter().map(|v| c[0] + c[1] * v).collect();
            (vec![c[0].exp(), c[1]], r_squared(&ln_y, &fitted))
        }
    };
    Ok(ScalingFit {
        model,
        coefficients,
        r_squared: r2,
    })
}

/// Slope of `ln y` against `ln N`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    let logged: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, y)| (n.ln(), y.ln()))
        .collect();
    if logged.len() < 2 || logged.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::param("log-log slope needs at least two positive points"));
    }
    let x: Vec<f64> = logged.iter().map(|p| p.0).collect();
    let y: Vec<f64> = logged.iter().map(|p| p.1).collect();
    Ok(least_squares(&[vec![1.0; x.len()], x], &y)?[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn pmf_first_term_and_point_mass() {
        let m = BlindSearchModel::single(12, 10).unwrap();
        let p: f64 = 1.0 / 4096.0;
        assert!(close(m.halting_pmf(1).unwrap(), 1.0 - (1.0 - p).powi(10), 1e-12));
        assert!(m.halting_pmf(0).is_err());
        let sure = BlindSearchModel::new(1.0, 3).unwrap();
        assert_eq!(sure.halting_pmf(1).unwrap(), 1.0);
        assert_eq!(sure.halting_pmf(2).unwrap(), 0.0);
    }

    #[test]
    fn pmf_sums_to_one_and_matches_cdf() {
        let m = BlindSearchModel::new(0.01, 7).unwrap();
        let mut partial = 0.0;
        for t in 1..=400u64 {
            partial += m.halting_pmf(t).unwrap();
            assert!((partial - m.success_cdf(t as f64)).abs() < 1e-13, "t={t}");
        }
        assert!((partial - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_matches_series() {
        // Truncated Σ t P(t) against the closed form at Mp >= 1e-4.
        for (p, m) in [(1e-4, 1usize), (0.002, 5), (0.3, 2)] {
            let model = BlindSearchModel::new(p, m).unwrap();
            let horizon = (60.0 / model.generation_success()) as u64;
            let series: f64 = (1..=horizon).map(|t| t as f64 * model.halting_pmf(t).unwrap()).sum();
            assert!(close(series, model.mean_halting_time(), 1e-9), "p={p} m={m}");
        }
    }

    #[test]
    fn mean_halting_time_values() {
        assert_eq!(BlindSearchModel::single(12, 1).unwrap().mean_halting_time().round(), 4096.0);
        let m10 = BlindSearchModel::single(12, 10).unwrap().mean_halting_time();
        assert!((m10 - 410.05).abs() < 0.01, "{m10}");
        let huge = BlindSearchModel::single(12, 1 << 20).unwrap().mean_halting_time();
        assert!((huge - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_properties() {
        let m = BlindSearchModel::single(12, 10).unwrap();
        assert!((m.success_cdf(410.0) - 0.6322).abs() < 1e-3);
        assert_eq!(m.success_cdf(f64::INFINITY), 1.0);
        let doubled_m = BlindSearchModel::single(12, 20).unwrap();
        assert!((doubled_m.success_cdf(100.0) - m.success_cdf(200.0)).abs() < 1e-15);
        let mut last = 0.0;
        for t in 1..2000 {
            let c = m.success_cdf(t as f64);
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn mean_cost_values() {
        let one = BlindSearchModel::single(12, 1).unwrap().mean_cost(12);
        assert!((one - 1.0).abs() < 1e-12, "{one}");
        let ten = BlindSearchModel::single(12, 10).unwrap().mean_cost(12);
        assert!((ten - 1.0011).abs() < 1e-4, "{ten}");
        let big = BlindSearchModel::single(12, 40960).unwrap().mean_cost(12);
        assert!(close(big, 10.0, 0.01), "{big}");
        let m = BlindSearchModel::single(12, 37).unwrap();
        assert_eq!(m.mean_cost(12), 37.0 * m.mean_halting_time() / 4096.0);
    }

    #[test]
    fn greedy_baseline() {
        assert!((greedy_cost(12) - 0.00146).abs() < 5e-6);
        // About 680x below the unit blind-search cost.
        assert!((1.0 / greedy_cost(12) - 682.7).abs() < 0.1);
    }

    #[test]
    fn degenerate_probability() {
        let d = BlindSearchModel::degenerate(10, 1).unwrap();
        assert_eq!(d.p, 1.0 / 512.0);
        let spec = LandscapeSpec::ising(crate::landscape::IsingVariant::Ferromagnetic, 10);
        assert_eq!(BlindSearchModel::for_spec(&spec, 1).unwrap(), d);
    }

    #[test]
    fn model_validation() {
        assert!(BlindSearchModel::new(0.0, 1).is_err());
        assert!(BlindSearchModel::new(1.5, 1).is_err());
        assert!(BlindSearchModel::new(0.5, 0).is_err());
    }

    #[test]
    fn exact_recovery() {
        let pts: Vec<(f64, f64)> = (8..=20).map(|n| {
            let n = n as f64;
            (n, 2.0 * n + 3.0 * n * n.ln())
        }).collect();
        let fit = fit_scaling(&pts, ScalingModel::NLogN).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-9);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let lin: Vec<(f64, f64)> = (4..10).map(|n| (n as f64, 1.23 * n as f64 - 18.13)).collect();
        let fit = fit_scaling(&lin, ScalingModel::Linear).unwrap();
        assert!((fit.coefficients[0] - 1.23).abs() < 1e-9 && (fit.coefficients[1] + 18.13).abs() < 1e-9);

        let exp: Vec<(f64, f64)> = (4..10).map(|n| (n as f64, 0.5 * (0.3 * n as f64).exp())).collect();
        let fit = fit_scaling(&exp, ScalingModel::Exponential).unwrap();
        assert!((fit.coefficients[0] - 0.5).abs() < 1e-9 && (fit.coefficients[1] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn noisy_quadratic() {
        let mut rng = crate::rng::stream(0, "test", &[]);
        let pts: Vec<(f64, f64)> = (8..=24)
            .step_by(2)
            .map(|n| {
                let n = n as f64;
                (n, 0.41 * n * n * (1.0 + 0.01 * (2.0 * rng.gen::<f64>() - 1.0)))
            })
            .collect();
        let fit = fit_scaling(&pts, ScalingModel::Quadratic).unwrap();
        assert!(close(fit.coefficients[0], 0.41, 0.05));
        let slope = log_log_slope(&pts).unwrap();
        assert!((slope - 2.0).abs() < 0.05);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0)], ScalingModel::Linear).is_err());
        assert!(fit_scaling(&[(3.0, 1.0), (3.0, 2.0), (4.0, 2.0)], ScalingModel::Linear).is_err());
    }
}
