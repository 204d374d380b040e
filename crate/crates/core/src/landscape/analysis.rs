//! Exhaustive and sampled statistics of a landscape.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Landscape, MAX_ENUMERABLE_N};
use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::rng::{self, purpose};

/// States per parallel work unit. Partial results are merged in chunk order so
/// every float reduction is independent of the thread count.
const CHUNK_BITS: usize = 12;

/// Above this length fitness values are recomputed instead of materialized.
const MATERIALIZE_MAX_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeStats {
    pub n: usize,
    /// Strings strictly fitter than all `n` single-flip neighbors.
    pub local_maxima_count: u64,
    /// `local_maxima_count / 2^n`.
    pub maxima_density: f64,
    /// `K / N`; zero for landscapes without an epistasis parameter.
    pub alpha: f64,
    /// Pearson correlation of fitness over all (string, single-flip neighbor)
    /// pairs of this one landscape.
    pub empirical_neighbor_correlation: f64,
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERABLE_N {
        return Err(Error::Capability(format!(
            "exhaustive enumeration needs n <= {MAX_ENUMERABLE_N}, got n={n}"
        )));
    }
    Ok(())
}

fn chunk_ranges(n: usize) -> impl IndexedParallelIterator<Item = std::ops::Range<u64>> {
    let chunk = 1u64 << CHUNK_BITS.min(n);
    let count = ((1u64 << n) / chunk) as usize;
    (0..count).into_par_iter().map(move |c| c as u64 * chunk..(c as u64 + 1) * chunk)
}

enum Values<'a, L: Landscape + ?Sized> {
    Table(Vec<f64>),
    Lazy(&'a L),
}

impl<L: Landscape + ?Sized> Values<'_, L> {
    #[inline]
    fn get(&self, n: usize, bits: u64) -> f64 {
        match self {
            Values::Table(t) => t[bits as usize],
            Values::Lazy(l) => l.fitness(&Genotype::from_bits(n, bits)),
        }
    }
}

fn values<L: Landscape + ?Sized>(l: &L) -> Values<'_, L> {
    let n = l.n();
    if n <= MATERIALIZE_MAX_N {
        let mut table = vec![0.0; 1 << n];
        table
            .par_chunks_mut(1 << CHUNK_BITS.min(n))
            .enumerate()
            .for_each(|(c, out)| {
                let base = (c * out.len()) as u64;
                for (j, v) in out.iter_mut().enumerate() {
                    *v = l.fitness(&Genotype::from_bits(n, base + j as u64));
                }
            });
        Values::Table(table)
    } else {
        Values::Lazy(l)
    }
}

/// Every string attaining the maximal fitness, in numeric order, and that fitness.
pub fn global_maximum_bruteforce<L: Landscape + ?Sized>(l: &L) -> Result<(Vec<Genotype>, f64)> {
    let n = l.n();
    check_enumerable(n)?;
    let partials: Vec<(f64, Vec<u64>)> = chunk_ranges(n)
        .map(|range| {
            let mut best = f64::NEG_INFINITY;
            let mut at = Vec::new();
            for bits in range {
                let f = l.fitness(&Genotype::from_bits(n, bits));
                if f > best {
                    best = f;
                    at.clear();
                    at.push(bits);
                } else if f == best {
                    at.push(bits);
                }
            }
            (best, at)
        })
        .collect();
    let best = partials.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let maxima = partials
        .into_iter()
        .filter(|p| p.0 == best)
        .flat_map(|p| p.1)
        .map(|bits| Genotype::from_bits(n, bits))
        .collect();
    Ok((maxima, best))
}

/// Count strict local maxima under single-bit flips, with the exhaustive
/// neighbor correlation of the same landscape.
pub fn count_local_maxima<L: Landscape + ?Sized>(l: &L) -> Result<LandscapeStats> {
    let n = l.n();
    check_enumerable(n)?;
    let vals = values(l);

    // (maxima, Σf, Σf², Σ_i f(x) f(x ^ e_i))
    let partials: Vec<(u64, f64, f64, f64)> = chunk_ranges(n)
        .map(|range| {
            let mut count = 0u64;
            let (mut s1, mut s2, mut cross) = (0.0, 0.0, 0.0);
            for bits in range {
                let f = vals.get(n, bits);
                let mut is_max = true;
                let mut c = 0.0;
                for i in 0..n {
                    let g = vals.get(n, bits ^ (1 << i));
                    is_max &= f > g;
                    c += g;
                }
                count += is_max as u64;
                s1 += f;
                s2 += f * f;
                cross += f * c;
            }
            (count, s1, s2, cross)
        })
        .collect();

    let mut count = 0u64;
    let (mut s1, mut s2, mut cross) = (0.0, 0.0, 0.0);
    for p in partials {
        count += p.0;
        s1 += p.1;
        s2 += p.2;
        cross += p.3;
    }
    let states = 2f64.powi(n as i32);
    let mean = s1 / states;
    let var = s2 / states - mean * mean;
    let corr = if var > 0.0 {
        (cross / (states * n as f64) - mean * mean) / var
    } else {
        f64::NAN
    };

    Ok(LandscapeStats {
        n,
        local_maxima_count: count,
        maxima_density: count as f64 / states,
        alpha: l.epistasis().map_or(0.0, |k| k as f64 / n as f64),
        empirical_neighbor_correlation: corr,
    })
}

/// Pearson correlation of `(Φ(x), Φ(x'))` over `pairs` random neighbor pairs
/// drawn across the ensemble (landscapes visited round-robin, `x` uniform,
/// flipped site uniform).
pub fn neighbor_correlation<L: Landscape>(ensemble: &[L], pairs: usize, seed: u64) -> Result<f64> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::param("neighbor correlation needs a non-empty ensemble"))?;
    let (n, k) = (first.n(), first.epistasis());
    if ensemble.iter().any(|l| l.n() != n || l.epistasis() != k) {
        return Err(Error::param("ensemble members must share (n, k)"));
    }
    if pairs < 2 {
        return Err(Error::param("need at least two sampled pairs"));
    }

    let mut rng = rng::stream(seed, purpose::CORRELATION, &[n as u64]);
    let mut a = Vec::with_capacity(pairs);
    let mut b = Vec::with_capacity(pairs);
    for j in 0..pairs {
        let l = &ensemble[j % ensemble.len()];
        let x = Genotype::random(n, &mut rng);
        let i = rng.gen_range(0..n);
        a.push(l.fitness(&x));
        b.push(l.fitness(&x.flipped(i)));
    }
    Ok(pearson(&a, &b))
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len() as f64;
    let ma = a.iter().sum::<f64>() / len;
    let mb = b.iter().sum::<f64>() / len;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}
