use rand::Rng;

use super::ops::{imitate, one_point_crossover, Mutation, Roulette};
use super::raw::run_raw_with_rng;
use super::{Algorithm, BestTrace, Outcome, RunResult, SearchConfig};
use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::landscape::Landscape;
use crate::rng::{self, SimRng};

/// Stream tag for a single run keyed by its own seed.
const SEARCH_STREAM: &str = "search";

/// `M` strings with their cached fitness values.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Genotype>,
    fitness: Vec<f64>,
    generation: u64,
    scratch: Vec<Genotype>,
}

impl Population {
    pub fn from_members<L: Landscape + ?Sized>(members: Vec<Genotype>, landscape: &L) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::param("population must not be empty"));
        }
        let fitness = members
            .iter()
            .map(|g| landscape.checked_fitness(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Population {
            scratch: Vec::with_capacity(members.len()),
            members,
            fitness,
            generation: 0,
        })
    }

    pub fn members(&self) -> &[Genotype] {
        &self.members
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Generation index; the initial population is generation 0.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Index of the fittest member, lowest index on ties.
    pub fn fittest(&self) -> usize {
        let mut best = 0;
        for (i, &f) in self.fitness.iter().enumerate().skip(1) {
            if f > self.fitness[best] {
                best = i;
            }
        }
        best
    }

    pub fn best_fitness(&self) -> f64 {
        self.fitness[self.fittest()]
    }
}

/// `m` strings drawn uniformly at random.
pub fn init_population<L: Landscape + ?Sized, R: Rng + ?Sized>(m: usize, landscape: &L, rng: &mut R) -> Result<Population> {
    if m == 0 {
        return Err(Error::param("population size must be at least 1"));
    }
    let n = landscape.n();
    let members = (0..m).map(|_| Genotype::random(n, rng)).collect();
    Population::from_members(members, landscape)
}

/// Replace generation `t` by generation `t+1`.
///
/// Every offspring is built from generation `t` alone; nothing produced in
/// this step is visible to its siblings.
pub fn step<L: Landscape + ?Sized, R: Rng + ?Sized>(
    pop: &mut Population,
    landscape: &L,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<()> {
    let mutation = Mutation::new(config.u);
    advance(pop, landscape, config.algorithm, &mutation, rng)
}

fn advance<L: Landscape + ?Sized, R: Rng + ?Sized>(
    pop: &mut Population,
    landscape: &L,
    algorithm: Algorithm,
    mutation: &Mutation,
    rng: &mut R,
) -> Result<()> {
    let m = pop.members.len();
    let n = landscape.n();
    let mut next = std::mem::take(&mut pop.scratch);
    next.clear();

    match algorithm {
        Algorithm::Il => {
            let model = pop.members[pop.fittest()];
            for _ in 0..m {
                let target = pop.members[rng.gen_range(0..m)];
                next.push(mutation.apply(imitate(target, &model, rng), rng));
            }
        }
        Algorithm::Aga => {
            let roulette = Roulette::new(&pop.fitness)?;
            for _ in 0..m {
                let parent = pop.members[roulette.select(rng)];
                next.push(mutation.apply(parent, rng));
            }
        }
        Algorithm::Sga => {
            let roulette = Roulette::new(&pop.fitness)?;
            for _ in 0..m {
                let (a, b) = roulette.select_pair(rng)?;
                let cut = rng.gen_range(1..n);
                let child = one_point_crossover(&pop.members[a], &pop.members[b], cut)?;
                next.push(mutation.apply(child, rng));
            }
        }
        Algorithm::Bs => {
            for _ in 0..m {
                next.push(Genotype::random(n, rng));
            }
        }
        Algorithm::Raw => {
            return Err(Error::param("the adaptive walk has no population step"));
        }
    }

    for (f, g) in pop.fitness.iter_mut().zip(&next) {
        *f = landscape.fitness(g);
    }
    pop.scratch = std::mem::replace(&mut pop.members, next);
    pop.generation += 1;
    Ok(())
}

/// Run one search to halting or censoring. The run's randomness comes only
/// from `config.seed`.
pub fn run_search<L: Landscape + ?Sized>(landscape: &L, config: &SearchConfig) -> Result<RunResult> {
    let mut rng = rng::stream(config.seed, SEARCH_STREAM, &[]);
    run_search_with_rng(landscape, config, &mut rng)
}

pub fn run_search_with_rng<L: Landscape + ?Sized>(
    landscape: &L,
    config: &SearchConfig,
    rng: &mut SimRng,
) -> Result<RunResult> {
    config.validate()?;
    if config.algorithm == Algorithm::Raw {
        let (config, _) = config.normalized();
        return Ok(run_raw_with_rng(landscape, config.t_max, rng));
    }
    let pop = init_population(config.m, landscape, rng)?;
    evolve(pop, landscape, config, rng)
}

/// Iterate `pop` until a member reaches the global maximum fitness or the
/// halting time would exceed `t_max`. `pop` is taken as the initial population
/// (halting time 1).
pub(crate) fn evolve<L: Landscape + ?Sized, R: Rng + ?Sized>(
    mut pop: Population,
    landscape: &L,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<RunResult> {
    let target = landscape.global_max_fitness();
    let mutation = Mutation::new(config.u);
    let mut trace = BestTrace::new(pop.best_fitness());
    let mut t = 1u64;
    let mut outcome = if trace.best() >= target {
        Outcome::Success
    } else {
        Outcome::Censored
    };

    while outcome != Outcome::Success && t < config.t_max {
        advance(&mut pop, landscape, config.algorithm, &mutation, rng)?;
        t += 1;
        let best = pop.best_fitness();
        trace.observe(t - 1, best);
        if best >= target {
            outcome = Outcome::Success;
        }
    }

    Ok(RunResult {
        algorithm: config.algorithm,
        n: landscape.n(),
        m: pop.len(),
        outcome,
        t_end: t,
        best_trace: trace,
    })
}

/// Run from a caller-supplied initial population.
pub fn run_search_from<L: Landscape + ?Sized>(
    pop: Population,
    landscape: &L,
    config: &SearchConfig,
) -> Result<RunResult> {
    config.validate()?;
    if config.algorithm == Algorithm::Raw {
        return Err(Error::param("the adaptive walk does not take a population"));
    }
    let mut rng = rng::stream(config.seed, SEARCH_STREAM, &[]);
    evolve(pop, landscape, config, &mut rng)
}
