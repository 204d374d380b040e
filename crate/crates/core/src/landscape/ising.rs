use serde::{Deserialize, Serialize};

use super::{Family, Landscape};
use crate::error::{Error, Result};
use crate::genotype::{mask, Genotype, MAX_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsingVariant {
    /// `F = Σ s_i + N + 1`, spins `s_i = 2x_i - 1`.
    Noninteracting,
    /// `F = Σ s_i s_{i+1} + N + 1` on a ring.
    Ferromagnetic,
}

impl IsingVariant {
    pub fn family(&self) -> Family {
        match self {
            IsingVariant::Noninteracting => Family::IsingNoninteracting,
            IsingVariant::Ferromagnetic => Family::IsingFerromagnetic,
        }
    }
}

pub(super) fn validate_n(n: usize) -> Result<()> {
    if !(2..=MAX_BITS).contains(&n) {
        return Err(Error::param(format!("n={n} outside supported range 2..={MAX_BITS}")));
    }
    Ok(())
}

/// Ising chain fitness (negated energy shifted to be positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsingLandscape {
    n: usize,
    variant: IsingVariant,
}

impl IsingLandscape {
    pub fn new(n: usize, variant: IsingVariant) -> Result<Self> {
        validate_n(n)?;
        Ok(IsingLandscape { n, variant })
    }

    pub fn noninteracting(n: usize) -> Result<Self> {
        Self::new(n, IsingVariant::Noninteracting)
    }

    pub fn ferromagnetic(n: usize) -> Result<Self> {
        Self::new(n, IsingVariant::Ferromagnetic)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> IsingVariant {
        self.variant
    }

    /// Fitness with a length check.
    pub fn ising_fitness(&self, g: &Genotype) -> Result<f64> {
        self.checked_fitness(g)
    }

    pub fn global_maxima(&self) -> Vec<Genotype> {
        match self.variant {
            IsingVariant::Noninteracting => vec![Genotype::ones(self.n)],
            IsingVariant::Ferromagnetic => vec![Genotype::ones(self.n), Genotype::zeros(self.n)],
        }
    }
}

impl Landscape for IsingLandscape {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn fitness(&self, g: &Genotype) -> f64 {
        debug_assert_eq!(g.len(), self.n);
        let n = self.n as i64;
        let value = match self.variant {
            // Σ (2x_i - 1) = 2·ones - N
            IsingVariant::Noninteracting => 2 * g.count_ones() as i64 - n,
            // Each bond contributes +1 when aligned, -1 otherwise.
            IsingVariant::Ferromagnetic => {
                let b = g.bits();
                let rotated = ((b >> 1) | (b << (self.n - 1))) & mask(self.n);
                let broken = (b ^ rotated).count_ones() as i64;
                n - 2 * broken
            }
        };
        (value + n + 1) as f64
    }

    fn global_max_fitness(&self) -> f64 {
        (2 * self.n + 1) as f64
    }

    fn global_max_multiplicity(&self) -> usize {
        match self.variant {
            IsingVariant::Noninteracting => 1,
            IsingVariant::Ferromagnetic => 2,
        }
    }

    fn family(&self) -> Family {
        self.variant.family()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference(g: &Genotype, variant: IsingVariant) -> f64 {
        let n = g.len();
        let s = |i: usize| if g.get(i % n) { 1i64 } else { -1 };
        let sum: i64 = match variant {
            IsingVariant::Noninteracting => (0..n).map(s).sum(),
            IsingVariant::Ferromagnetic => (0..n).map(|i| s(i) * s(i + 1)).sum(),
        };
        (sum + n as i64 + 1) as f64
    }

    #[test]
    fn small_cases() {
        let ni = IsingLandscape::noninteracting(4).unwrap();
        let f = IsingLandscape::ferromagnetic(4).unwrap();
        assert_eq!(ni.fitness(&"1111".parse().unwrap()), 9.0);
        assert_eq!(ni.fitness(&"0000".parse().unwrap()), 1.0);
        assert_eq!(f.fitness(&"0101".parse().unwrap()), 1.0);
        assert_eq!(f.fitness(&"1111".parse().unwrap()), 9.0);
        assert_eq!(f.fitness(&"0000".parse().unwrap()), 9.0);
        assert!(ni.ising_fitness(&Genotype::zeros(5)).is_err());
    }

    proptest! {
        #[test]
        fn matches_spin_sums(n in 2usize..=64, bits: u64) {
            let g = Genotype::from_bits(n, bits);
            for v in [IsingVariant::Noninteracting, IsingVariant::Ferromagnetic] {
                let l = IsingLandscape::new(n, v).unwrap();
                prop_assert_eq!(l.fitness(&g), reference(&g, v));
                prop_assert!(l.fitness(&g) >= 1.0 && l.fitness(&g) <= l.global_max_fitness());
            }
        }

        #[test]
        fn ferromagnetic_complement_symmetry(n in 2usize..=64, bits: u64) {
            let l = IsingLandscape::ferromagnetic(n).unwrap();
            let g = Genotype::from_bits(n, bits);
            prop_assert_eq!(l.fitness(&g), l.fitness(&g.complement()));
        }

        #[test]
        fn noninteracting_up_flip_adds_two(n in 2usize..=64, bits: u64, site in 0usize..64) {
            let l = IsingLandscape::noninteracting(n).unwrap();
            let g = Genotype::from_bits(n, bits);
            let i = site % n;
            if !g.get(i) {
                prop_assert_eq!(l.fitness(&g.flipped(i)) - l.fitness(&g), 2.0);
            }
        }
    }
}
