//! Variation and selection operators.

use rand::Rng;

use crate::error::{Error, Result};
use crate::genotype::Genotype;

/// Independent per-bit flips with probability `u`.
///
/// Flip positions are generated by geometric skipping, so the cost is
/// proportional to the number of flips rather than to `N`.
#[derive(Debug, Clone, Copy)]
pub struct Mutation {
    u: f64,
    ln_keep: f64,
}

impl Mutation {
    pub fn new(u: f64) -> Self {
        assert!((0.0..=1.0).contains(&u), "mutation probability {u} outside [0, 1]");
        Mutation {
            u,
            ln_keep: (1.0 - u).ln(),
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn apply<R: Rng + ?Sized>(&self, g: Genotype, rng: &mut R) -> Genotype {
        if self.u == 0.0 {
            return g;
        }
        if self.u == 1.0 {
            return g.complement();
        }
        if self.u == 0.5 {
            return g.xor_mask(rng.gen::<u64>());
        }
        let n = g.len() as f64;
        let mut flips = 0u64;
        let mut pos = 0.0f64;
        loop {
            // Failures before the next flip: P(skip >= s) = (1-u)^s.
            let r: f64 = rng.gen();
            pos += ((1.0 - r).ln() / self.ln_keep).floor();
            if pos >= n {
                break;
            }
            flips |= 1 << pos as u32;
            pos += 1.0;
        }
        g.xor_mask(flips)
    }
}

pub fn mutate<R: Rng + ?Sized>(g: Genotype, u: f64, rng: &mut R) -> Genotype {
    Mutation::new(u).apply(g, rng)
}

/// Fitness-proportional selection over a fixed set of weights.
#[derive(Debug, Clone)]
pub struct Roulette {
    cumulative: Vec<f64>,
}

impl Roulette {
    pub fn new(fitness: &[f64]) -> Result<Self> {
        if fitness.is_empty() {
            return Err(Error::param("roulette over an empty population"));
        }
        let mut cumulative = Vec::with_capacity(fitness.len());
        let mut total = 0.0;
        for &f in fitness {
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::Invariant(format!("roulette weight {f} is not a finite non-negative value")));
            }
            total += f;
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::Invariant("roulette total fitness is not positive".into()));
        }
        Ok(Roulette { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn weight(&self, i: usize) -> f64 {
        self.cumulative[i] - if i == 0 { 0.0 } else { self.cumulative[i - 1] }
    }

    /// First index whose cumulative weight exceeds `r`.
    fn locate(&self, r: f64) -> usize {
        self.cumulative.partition_point(|&c| c <= r).min(self.len() - 1)
    }

    /// Index `i` with probability `w_i / Σ w`.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.locate(rng.gen::<f64>() * self.total())
    }

    /// Two distinct indices: the first by roulette over all members, the
    /// second by roulette over the remaining ones.
    pub fn select_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, usize)> {
        if self.len() < 2 {
            return Err(Error::param("selecting two parents needs at least two members"));
        }
        let first = self.select(rng);
        let w = self.weight(first);
        let before = self.cumulative[first] - w;
        // Draw on the line with the first parent's segment cut out.
        let mut r = rng.gen::<f64>() * (self.total() - w);
        if r >= before {
            r += w;
        }
        let mut second = self.locate(r);
        if second == first {
            // Only reachable through rounding at a segment edge.
            second = if first + 1 < self.len() { first + 1 } else { first - 1 };
        }
        Ok((first, second))
    }
}

pub fn roulette_select<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> Result<usize> {
    Ok(Roulette::new(fitness)?.select(rng))
}

pub fn select_two_without_replacement<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> Result<(usize, usize)> {
    if fitness.len() < 2 {
        return Err(Error::param("selecting two parents needs at least two members"));
    }
    Roulette::new(fitness)?.select_pair(rng)
}

/// Sites `0..n_point` from `a`, the rest from `b`.
pub fn one_point_crossover(a: &Genotype, b: &Genotype, n_point: usize) -> Result<Genotype> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::param("crossover parents differ in length"));
    }
    if n_point == 0 || n_point >= n {
        return Err(Error::param(format!("crossover point {n_point} outside 1..={}", n - 1)));
    }
    let low = (1u64 << n_point) - 1;
    Ok(Genotype::from_bits(n, (a.bits() & low) | (b.bits() & !low)))
}

/// Copy one uniformly chosen differing bit from `model` into `target`.
/// Identical strings are returned unchanged.
pub fn imitate<R: Rng + ?Sized>(target: Genotype, model: &Genotype, rng: &mut R) -> Genotype {
    let mut diff = target.diff_mask(model);
    if diff == 0 {
        return target;
    }
    let pick = rng.gen_range(0..diff.count_ones());
    for _ in 0..pick {
        diff &= diff - 1;
    }
    target.flipped(diff.trailing_zeros() as usize)
}
