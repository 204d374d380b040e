use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest supported string. Exhaustive analysis is limited further (see
/// [`crate::landscape::MAX_ENUMERABLE_N`]).
pub const MAX_BITS: usize = 64;

/// A binary string of fixed length `n`, packed into a machine word.
///
/// Site `i` (0-based, written left to right when displayed) is bit `i` of the
/// word, so `"0011"` has sites 2 and 3 set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Genotype {
    bits: u64,
    n: u8,
}

#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Genotype {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_BITS).contains(&n), "genotype length {n} out of range");
        Genotype { bits: 0, n: n as u8 }
    }

    pub fn ones(n: usize) -> Self {
        Self::from_bits(n, u64::MAX)
    }

    /// Builds a genotype from the low `n` bits of `bits`; higher bits are dropped.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!((1..=MAX_BITS).contains(&n), "genotype length {n} out of range");
        Genotype {
            bits: bits & mask(n),
            n: n as u8,
        }
    }

    /// Uniform over all `2^n` strings.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_bits(n, rng.gen::<u64>())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len());
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len());
        self.bits ^= 1 << i;
    }

    #[inline]
    pub fn flipped(mut self, i: usize) -> Self {
        self.flip(i);
        self
    }

    /// XOR with a mask; bits above `n` are ignored.
    #[inline]
    pub fn xor_mask(self, m: u64) -> Self {
        Genotype {
            bits: (self.bits ^ m) & mask(self.len()),
            n: self.n,
        }
    }

    pub fn complement(self) -> Self {
        self.xor_mask(u64::MAX)
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn hamming(&self, other: &Genotype) -> u32 {
        debug_assert_eq!(self.n, other.n);
        (self.bits ^ other.bits).count_ones()
    }

    /// Positions where the two strings differ, as a bit mask.
    #[inline]
    pub fn diff_mask(&self, other: &Genotype) -> u64 {
        self.bits ^ other.bits
    }

    /// Iterator over all `2^n` strings of length `n`, in numeric order.
    pub fn all(n: usize) -> impl Iterator<Item = Genotype> {
        assert!(n < 64, "cannot enumerate 2^{n} strings");
        (0..1u64 << n).map(move |b| Genotype::from_bits(n, b))
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_BITS {
            return Err(Error::param(format!("genotype length {n} out of range 1..={MAX_BITS}")));
        }
        let mut g = Genotype::zeros(n);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => g.set(i, true),
                _ => return Err(Error::param(format!("invalid genotype character {c:?}"))),
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_site_order() {
        let g: Genotype = "0011".parse().unwrap();
        assert!(!g.get(0) && !g.get(1) && g.get(2) && g.get(3));
        assert_eq!(g.bits(), 0b1100);
        assert_eq!(g.to_string(), "0011");
    }

    #[test]
    fn complement_and_hamming() {
        let g: Genotype = "0110".parse().unwrap();
        assert_eq!(g.complement().to_string(), "1001");
        assert_eq!(g.hamming(&g.complement()), 4);
        assert_eq!(Genotype::ones(64).count_ones(), 64);
        assert_eq!(Genotype::ones(64).complement(), Genotype::zeros(64));
    }

    #[test]
    fn rejects_bad_strings() {
        assert!("".parse::<Genotype>().is_err());
        assert!("01a".parse::<Genotype>().is_err());
    }

    #[test]
    fn enumeration_covers_space() {
        assert_eq!(Genotype::all(5).count(), 32);
        assert_eq!(Genotype::all(5).last().unwrap(), Genotype::ones(5));
    }
}
