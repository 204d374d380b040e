//! Population search algorithms and the single-walker adaptive walk.
//!
//! All population algorithms share one synchronous loop: generation `t+1` is
//! built from generation `t` only, then replaces it wholesale. The initial
//! population counts as halting time `t = 1`; the best-so-far trace indexes
//! that same population as generation `0`.

mod engine;
mod ops;
mod raw;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use engine::{init_population, run_search, run_search_from, run_search_with_rng, step, Population};
pub use ops::{imitate, mutate, one_point_crossover, roulette_select, select_two_without_replacement, Mutation, Roulette};
pub use raw::{run_raw, run_raw_with_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Imitative learning: copy one differing bit from the fittest member, then mutate.
    Il,
    /// Asexual GA: fitness-proportional selection, then mutation.
    Aga,
    /// Sexual GA: two parents without replacement, one-point crossover, mutation.
    Sga,
    /// Blind search: every member is redrawn uniformly each generation.
    Bs,
    /// Random adaptive walk (single walker).
    Raw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Algorithm::Il, Algorithm::Aga, Algorithm::Sga, Algorithm::Bs, Algorithm::Raw];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Il => "il",
            Algorithm::Aga => "aga",
            Algorithm::Sga => "sga",
            Algorithm::Bs => "bs",
            Algorithm::Raw => "raw",
        }
    }

    /// Stable small integer used in seed derivation.
    pub(crate) fn tag(&self) -> u64 {
        match self {
            Algorithm::Il => 1,
            Algorithm::Aga => 2,
            Algorithm::Sga => 3,
            Algorithm::Bs => 4,
            Algorithm::Raw => 5,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::param(format!("unknown algorithm {s:?} (expected il, aga, sga, bs or raw)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    /// Population size. The adaptive walk always uses one walker.
    pub m: usize,
    /// Per-bit mutation probability, `0 <= u <= 1/2`. Ignored by BS and RAW.
    pub u: f64,
    /// Largest halting time a run may reach before it is censored.
    pub t_max: u64,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm, m: usize, u: f64, t_max: u64, seed: u64) -> Self {
        SearchConfig {
            algorithm,
            m,
            u,
            t_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("population size must be at least 1"));
        }
        if !(0.0..=0.5).contains(&self.u) {
            return Err(Error::param(format!("mutation probability u={} outside [0, 0.5]", self.u)));
        }
        if self.t_max == 0 {
            return Err(Error::param("t_max must be at least 1"));
        }
        if self.algorithm == Algorithm::Sga && self.m < 2 {
            return Err(Error::param("SGA needs a population of at least 2"));
        }
        Ok(())
    }

    /// The adaptive walk has exactly one walker; returns the corrected config
    /// and whether `m` had to be changed.
    pub fn normalized(mut self) -> (Self, bool) {
        if self.algorithm == Algorithm::Raw && self.m != 1 {
            self.m = 1;
            (self, true)
        } else {
            (self, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    /// Reached `t_max` without finding a global maximum.
    Censored,
    /// Adaptive walk sitting on a strict local maximum.
    Stuck,
}

/// Best fitness seen so far, stored as change points `(generation, fitness)`
/// starting at generation 0 (the initial population).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestTrace {
    points: Vec<(u64, f64)>,
}

impl BestTrace {
    pub(crate) fn new(initial: f64) -> Self {
        BestTrace {
            points: vec![(0, initial)],
        }
    }

    pub(crate) fn observe(&mut self, generation: u64, fitness: f64) {
        if fitness > self.best() {
            self.points.push((generation, fitness));
        }
    }

    pub fn best(&self) -> f64 {
        self.points.last().unwrap().1
    }

    /// Best fitness over generations `0..=generation`.
    pub fn best_at(&self, generation: u64) -> f64 {
        let idx = self.points.partition_point(|p| p.0 <= generation);
        self.points[idx.max(1) - 1].1
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub outcome: Outcome,
    /// Halting time at which the run ended: `t*` on success, otherwise the
    /// last time reached (`t_max` when censored).
    pub t_end: u64,
    pub best_trace: BestTrace,
}

impl RunResult {
    pub fn success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    /// `t*`, or `None` for censored and stuck runs.
    pub fn t_star(&self) -> Option<u64> {
        self.success().then_some(self.t_end)
    }

    /// `C = M t* / 2^N`, defined only for successful runs.
    pub fn cost(&self) -> Option<f64> {
        self.t_star()
            .map(|t| self.m as f64 * t as f64 / 2f64.powi(self.n as i32))
    }

    /// Moves made after the initial draw (for the adaptive walk: accepted flips).
    pub fn moves(&self) -> u64 {
        self.t_end - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("ga".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(Algorithm::Il, 10, 0.1, 100, 0).validate().is_ok());
        assert!(SearchConfig::new(Algorithm::Il, 0, 0.1, 100, 0).validate().is_err());
        assert!(SearchConfig::new(Algorithm::Il, 10, 0.6, 100, 0).validate().is_err());
        assert!(SearchConfig::new(Algorithm::Il, 10, 0.1, 0, 0).validate().is_err());
        assert!(SearchConfig::new(Algorithm::Sga, 1, 0.1, 100, 0).validate().is_err());
    }

    #[test]
    fn raw_forces_single_walker() {
        let (c, changed) = SearchConfig::new(Algorithm::Raw, 5, 0.0, 10, 0).normalized();
        assert!(changed);
        assert_eq!(c.m, 1);
        assert!(!SearchConfig::new(Algorithm::Raw, 1, 0.0, 10, 0).normalized().1);
    }

    #[test]
    fn trace_lookup() {
        let mut t = BestTrace::new(0.5);
        t.observe(3, 0.4);
        t.observe(3, 0.6);
        t.observe(7, 0.9);
        assert_eq!(t.points(), &[(0, 0.5), (3, 0.6), (7, 0.9)]);
        assert_eq!(t.best_at(0), 0.5);
        assert_eq!(t.best_at(2), 0.5);
        assert_eq!(t.best_at(3), 0.6);
        assert_eq!(t.best_at(100), 0.9);
    }
}
