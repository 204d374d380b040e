use rand::Rng;

use super::{Algorithm, BestTrace, Outcome, RunResult};
use crate::genotype::{Genotype, MAX_BITS};
use crate::landscape::Landscape;
use crate::rng::{self, SimRng};

/// Random adaptive walk from a uniform random start.
///
/// Each time step applies one flip chosen uniformly among the single-bit
/// flips that do not lower fitness. A walker with no such flip is on a strict
/// local maximum and the run ends as [`Outcome::Stuck`].
pub fn run_raw<L: Landscape + ?Sized>(landscape: &L, seed: u64, t_max: u64) -> RunResult {
    let mut rng = rng::stream(seed, "search", &[]);
    run_raw_with_rng(landscape, t_max, &mut rng)
}

pub fn run_raw_with_rng<L: Landscape + ?Sized>(landscape: &L, t_max: u64, rng: &mut SimRng) -> RunResult {
    let start = Genotype::random(landscape.n(), rng);
    walk_from(landscape, start, t_max, rng)
}

pub(crate) fn walk_from<L: Landscape + ?Sized, R: Rng + ?Sized>(
    landscape: &L,
    start: Genotype,
    t_max: u64,
    rng: &mut R,
) -> RunResult {
    let n = landscape.n();
    let target = landscape.global_max_fitness();
    let mut x = start;
    let mut f = landscape.fitness(&x);
    let mut trace = BestTrace::new(f);
    let mut t = 1u64;
    let mut candidates = [(Genotype::zeros(1), 0.0f64); MAX_BITS];

    let outcome = loop {
        if f >= target {
            break Outcome::Success;
        }
        if t >= t_max {
            break Outcome::Censored;
        }
        let mut count = 0;
        for i in 0..n {
            let y = x.flipped(i);
            let fy = landscape.fitness(&y);
            if fy >= f {
                candidates[count] = (y, fy);
                count += 1;
            }
        }
        if count == 0 {
            break Outcome::Stuck;
        }
        (x, f) = candidates[rng.gen_range(0..count)];
        t += 1;
        trace.observe(t - 1, f);
    };

    RunResult {
        algorithm: Algorithm::Raw,
        n,
        m: 1,
        outcome,
        t_end: t,
        best_trace: trace,
    }
}
