//! Fitness landscapes over binary strings.

pub mod analysis;
pub mod io;
mod ising;
mod nk;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genotype::Genotype;

pub use analysis::{
    count_local_maxima, global_maximum_bruteforce, neighbor_correlation, LandscapeStats,
};
pub use ising::{IsingLandscape, IsingVariant};
pub use nk::{generate_nk, global_maximum_dp, NkLandscape};

/// Largest `n` for exhaustive operations (brute-force maximum, local maxima).
pub const MAX_ENUMERABLE_N: usize = 30;

/// Anything that maps strings of a fixed length to a positive fitness.
///
/// Implementations are immutable and shared read-only across concurrent
/// searches.
pub trait Landscape: Send + Sync {
    fn n(&self) -> usize;

    /// Fitness of `g`. The caller guarantees `g.len() == self.n()`.
    fn fitness(&self, g: &Genotype) -> f64;

    /// Fitness of the global maximum (shared by every maximum when degenerate).
    fn global_max_fitness(&self) -> f64;

    /// Number of strings attaining the global maximum.
    fn global_max_multiplicity(&self) -> usize {
        1
    }

    /// Epistasis degree, for landscapes that have one.
    fn epistasis(&self) -> Option<usize> {
        None
    }

    fn family(&self) -> Family;

    fn checked_fitness(&self, g: &Genotype) -> Result<f64> {
        if g.len() != self.n() {
            return Err(Error::param(format!(
                "genotype length {} does not match landscape n={}",
                g.len(),
                self.n()
            )));
        }
        Ok(self.fitness(g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "nk")]
    Nk,
    #[serde(rename = "ising-ni")]
    IsingNoninteracting,
    #[serde(rename = "ising-f")]
    IsingFerromagnetic,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Nk => "nk",
            Family::IsingNoninteracting => "ising-ni",
            Family::IsingFerromagnetic => "ising-f",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nk" => Ok(Family::Nk),
            "ising-ni" => Ok(Family::IsingNoninteracting),
            "ising-f" => Ok(Family::IsingFerromagnetic),
            _ => Err(Error::param(format!("unknown landscape family {s:?}"))),
        }
    }
}

/// Family plus size parameters; identifies an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub family: Family,
    pub n: usize,
    /// Epistasis degree; always 0 for Ising landscapes.
    pub k: usize,
}

impl LandscapeSpec {
    pub fn nk(n: usize, k: usize) -> Self {
        LandscapeSpec { family: Family::Nk, n, k }
    }

    pub fn ising(variant: IsingVariant, n: usize) -> Self {
        LandscapeSpec {
            family: variant.family(),
            n,
            k: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Nk => nk::validate_params(self.n, self.k),
            Family::IsingNoninteracting | Family::IsingFerromagnetic => {
                ising::validate_n(self.n)?;
                if self.k != 0 {
                    return Err(Error::param("Ising landscapes take no epistasis parameter"));
                }
                Ok(())
            }
        }
    }

    /// Directory name inside an ensemble root.
    pub fn dir_name(&self) -> String {
        match self.family {
            Family::Nk => format!("N{}_K{}", self.n, self.k),
            f => format!("{}_N{}", f.as_str(), self.n),
        }
    }

    /// Probability that a uniform string is a global maximum.
    pub fn hit_probability(&self) -> f64 {
        let multiplicity = match self.family {
            Family::IsingFerromagnetic => 2.0,
            _ => 1.0,
        };
        multiplicity / 2f64.powi(self.n as i32)
    }
}

/// A landscape of any supported family.
#[derive(Debug, Clone)]
pub enum AnyLandscape {
    Nk(NkLandscape),
    Ising(IsingLandscape),
}

impl AnyLandscape {
    pub fn spec(&self) -> LandscapeSpec {
        match self {
            AnyLandscape::Nk(l) => LandscapeSpec::nk(l.n(), l.k()),
            AnyLandscape::Ising(l) => LandscapeSpec::ising(l.variant(), l.n()),
        }
    }

    pub fn as_nk(&self) -> Option<&NkLandscape> {
        match self {
            AnyLandscape::Nk(l) => Some(l),
            AnyLandscape::Ising(_) => None,
        }
    }
}

impl From<NkLandscape> for AnyLandscape {
    fn from(l: NkLandscape) -> Self {
        AnyLandscape::Nk(l)
    }
}

impl From<IsingLandscape> for AnyLandscape {
    fn from(l: IsingLandscape) -> Self {
        AnyLandscape::Ising(l)
    }
}

impl Landscape for AnyLandscape {
    fn n(&self) -> usize {
        match self {
            AnyLandscape::Nk(l) => l.n(),
            AnyLandscape::Ising(l) => l.n(),
        }
    }

    fn fitness(&self, g: &Genotype) -> f64 {
        match self {
            AnyLandscape::Nk(l) => l.fitness(g),
            AnyLandscape::Ising(l) => l.fitness(g),
        }
    }

    fn global_max_fitness(&self) -> f64 {
        match self {
            AnyLandscape::Nk(l) => l.global_max_fitness(),
            AnyLandscape::Ising(l) => l.global_max_fitness(),
        }
    }

    fn global_max_multiplicity(&self) -> usize {
        match self {
            AnyLandscape::Nk(l) => l.global_max_multiplicity(),
            AnyLandscape::Ising(l) => l.global_max_multiplicity(),
        }
    }

    fn epistasis(&self) -> Option<usize> {
        match self {
            AnyLandscape::Nk(l) => l.epistasis(),
            AnyLandscape::Ising(l) => l.epistasis(),
        }
    }

    fn family(&self) -> Family {
        match self {
            AnyLandscape::Nk(l) => l.family(),
            AnyLandscape::Ising(l) => l.family(),
        }
    }
}
