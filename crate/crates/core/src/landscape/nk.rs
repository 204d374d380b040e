use rand::Rng;

use super::{Family, Landscape};
use crate::error::{Error, Result};
use crate::genotype::{Genotype, MAX_BITS};
use crate::rng::{self, purpose};

/// Strings up to this length get a precomputed fitness table (2^n entries).
const FULL_TABLE_MAX_N: usize = 16;

/// Brute-force uniqueness of the global maximum is checked up to this length.
const UNIQUENESS_CHECK_MAX_N: usize = 20;

/// An NK landscape with the adjacent neighborhood: site `i` interacts with
/// sites `i+1, …, i+K` (mod N).
///
/// Contributions are stored explicitly, site-major. Entry `w` of site `i`'s
/// table is the contribution when `x_{i+t} = (w >> t) & 1` for `t = 0..=K`.
#[derive(Debug, Clone)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    seed: u64,
    redraws: u32,
    tables: Vec<f64>,
    global_max: Genotype,
    global_fitness: f64,
    full: Vec<f64>,
}

pub(super) fn validate_params(n: usize, k: usize) -> Result<()> {
    if !(4..=MAX_BITS).contains(&n) {
        return Err(Error::param(format!("n={n} outside supported range 4..={MAX_BITS}")));
    }
    if k >= n {
        return Err(Error::param(format!("k={k} must satisfy 0 <= k <= n-1 = {}", n - 1)));
    }
    // 2^(K+1) entries per site; beyond this the explicit tables are impractical.
    if k > 20 {
        return Err(Error::Capability(format!("k={k} exceeds the explicit-table limit of 20")));
    }
    Ok(())
}

/// Generate an NK landscape. Identical `(n, k, seed)` give bit-identical tables.
///
/// Table entries are i.i.d. uniform on `[0, 1)`. If a tie for the global
/// maximum is detected the tables are redrawn from the next stream; the
/// number of redraws is available from [`NkLandscape::redraws`].
pub fn generate_nk(n: usize, k: usize, seed: u64) -> Result<NkLandscape> {
    validate_params(n, k)?;
    let len = n << (k + 1);
    for redraw in 0u32.. {
        let mut rng = rng::stream(seed, purpose::NK_TABLES, &[n as u64, k as u64, redraw as u64]);
        let tables: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let mut landscape = NkLandscape::assemble(n, k, seed, tables);
        landscape.redraws = redraw;
        if landscape.max_is_unique() {
            return Ok(landscape);
        }
    }
    unreachable!()
}

impl NkLandscape {
    /// Rebuild a landscape from explicit tables (e.g. read from disk).
    pub fn from_tables(n: usize, k: usize, seed: u64, tables: Vec<f64>) -> Result<Self> {
        validate_params(n, k)?;
        if tables.len() != n << (k + 1) {
            return Err(Error::param(format!(
                "expected {} table entries for n={n}, k={k}, got {}",
                n << (k + 1),
                tables.len()
            )));
        }
        if let Some(bad) = tables.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::param(format!("table entry {bad} outside [0, 1)")));
        }
        Ok(Self::assemble(n, k, seed, tables))
    }

    fn assemble(n: usize, k: usize, seed: u64, tables: Vec<f64>) -> Self {
        let mut l = NkLandscape {
            n,
            k,
            seed,
            redraws: 0,
            tables,
            global_max: Genotype::zeros(n),
            global_fitness: 0.0,
            full: Vec::new(),
        };
        if n <= FULL_TABLE_MAX_N {
            l.full = Genotype::all(n).map(|g| l.evaluate(&g)).collect();
        }
        let best = global_maximum_dp(&l);
        l.global_max = best.0;
        l.global_fitness = best.1;
        l
    }

    fn max_is_unique(&self) -> bool {
        if self.n > UNIQUENESS_CHECK_MAX_N {
            return true;
        }
        let ties = Genotype::all(self.n)
            .filter(|g| self.fitness(g) >= self.global_fitness)
            .count();
        ties == 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn redraws(&self) -> u32 {
        self.redraws
    }

    /// All contribution tables, site-major.
    pub fn tables(&self) -> &[f64] {
        &self.tables
    }

    /// Contribution table of site `i`.
    pub fn site_table(&self, i: usize) -> &[f64] {
        let stride = 1 << (self.k + 1);
        &self.tables[i * stride..(i + 1) * stride]
    }

    pub fn global_max(&self) -> (Genotype, f64) {
        (self.global_max, self.global_fitness)
    }

    /// Table index of site `i`'s neighborhood window in `g`.
    #[inline]
    pub fn window(&self, g: &Genotype, i: usize) -> usize {
        let b = g.bits() as u128;
        let doubled = b | (b << self.n);
        ((doubled >> i) & ((1u128 << (self.k + 1)) - 1)) as usize
    }

    /// Direct evaluation from the contribution tables.
    #[inline]
    fn evaluate(&self, g: &Genotype) -> f64 {
        let stride = 1 << (self.k + 1);
        let mask = (1u128 << (self.k + 1)) - 1;
        let b = g.bits() as u128;
        let doubled = b | (b << self.n);
        let mut sum = 0.0;
        for i in 0..self.n {
            let w = ((doubled >> i) & mask) as usize;
            sum += self.tables[i * stride + w];
        }
        sum / self.n as f64
    }

    /// Fitness with a length check.
    pub fn nk_fitness(&self, g: &Genotype) -> Result<f64> {
        self.checked_fitness(g)
    }
}

impl Landscape for NkLandscape {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn fitness(&self, g: &Genotype) -> f64 {
        debug_assert_eq!(g.len(), self.n);
        if self.full.is_empty() {
            self.evaluate(g)
        } else {
            self.full[g.bits() as usize]
        }
    }

    fn global_max_fitness(&self) -> f64 {
        self.global_fitness
    }

    fn epistasis(&self) -> Option<usize> {
        Some(self.k)
    }

    fn family(&self) -> Family {
        Family::Nk
    }
}

/// Exact global maximum by dynamic programming over the cyclic chain.
///
/// The first `K` bits are fixed (2^K boundary cases). For each boundary the
/// sites `K..N` are swept with a state holding the last `K` bits chosen;
/// setting `x_j` completes the window of site `j-K`. The `K` windows that wrap
/// around are closed against the boundary at the end. Cost is `O(N 4^K)`.
///
/// The returned fitness is re-evaluated with the landscape's own summation
/// order, so it compares bit-exactly with [`Landscape::fitness`].
pub fn global_maximum_dp(l: &NkLandscape) -> (Genotype, f64) {
    let (n, k) = (l.n, l.k);
    let mut best = Genotype::zeros(n);

    if k == 0 {
        for i in 0..n {
            let t = l.site_table(i);
            best.set(i, !(t[0] > t[1]));
        }
        return (best, l.fitness(&best));
    }

    let states = 1usize << k;
    let win_mask = (1usize << (k + 1)) - 1;
    let steps = n - k;
    let mut best_value = f64::NEG_INFINITY;

    let mut value = vec![f64::NEG_INFINITY; states];
    let mut next = vec![f64::NEG_INFINITY; states];
    // prev[(j - k) * states + s] = predecessor state of s after setting x_j.
    let mut prev = vec![0u32; steps * states];

    for boundary in 0..states {
        value.fill(f64::NEG_INFINITY);
        value[boundary] = 0.0;
        for j in k..n {
            next.fill(f64::NEG_INFINITY);
            let table = l.site_table(j - k);
            let back = &mut prev[(j - k) * states..(j - k + 1) * states];
            for (s, &v) in value.iter().enumerate() {
                if v == f64::NEG_INFINITY {
                    continue;
                }
                for b in 0..2usize {
                    let w = s | (b << k);
                    let ns = w >> 1;
                    let cand = v + table[w];
                    if cand > next[ns] {
                        next[ns] = cand;
                        back[ns] = s as u32;
                    }
                }
            }
            std::mem::swap(&mut value, &mut next);
        }

        // Close the wrapped windows: bit t of `joined` is x_{n-k+t} for t < k
        // and x_{t-k} for t >= k.
        for (s, &v) in value.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            let joined = s | (boundary << k);
            let mut total = v;
            for r in 0..k {
                total += l.site_table(n - k + r)[(joined >> r) & win_mask];
            }
            if total > best_value {
                best_value = total;
                let mut g = Genotype::from_bits(n, boundary as u64);
                let mut state = s;
                for j in (k..n).rev() {
                    g.set(j, (state >> (k - 1)) & 1 == 1);
                    state = prev[(j - k) * states + state] as usize;
                }
                best = g;
            }
        }
    }

    (best, l.fitness(&best))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straightforward evaluator: builds each neighborhood bit by bit.
    fn naive_fitness(l: &NkLandscape, g: &Genotype) -> f64 {
        let n = l.n();
        let mut sum = 0.0;
        for i in 0..n {
            let mut idx = 0;
            for t in 0..=l.k() {
                if g.get((i + t) % n) {
                    idx |= 1 << t;
                }
            }
            sum += l.site_table(i)[idx];
        }
        sum / n as f64
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(generate_nk(12, 12, 1), Err(Error::Parameter(_))));
        assert!(matches!(generate_nk(3, 0, 1), Err(Error::Parameter(_))));
        assert!(generate_nk(12, 11, 1).is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_nk(12, 3, 99).unwrap();
        let b = generate_nk(12, 3, 99).unwrap();
        assert_eq!(a.tables(), b.tables());
        assert_eq!(a.global_max(), b.global_max());
        let c = generate_nk(12, 3, 100).unwrap();
        assert_ne!(a.tables(), c.tables());
    }

    #[test]
    fn table_entries_in_unit_interval() {
        let l = generate_nk(10, 4, 5).unwrap();
        assert_eq!(l.tables().len(), 10 * 32);
        assert!(l.tables().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn fitness_matches_naive_evaluator() {
        for &(n, k) in &[(12, 3), (20, 5), (40, 2), (64, 7)] {
            let l = generate_nk(n, k, 11).unwrap();
            let mut rng = rng::stream(3, "test", &[]);
            for _ in 0..500 {
                let g = Genotype::random(n, &mut rng);
                let f = l.fitness(&g);
                assert_eq!(f.to_bits(), naive_fitness(&l, &g).to_bits(), "n={n} k={k} g={g}");
                assert!(f > 0.0 && f < 1.0);
            }
        }
    }

    #[test]
    fn k0_is_additive() {
        let l = generate_nk(12, 0, 3).unwrap();
        let g: Genotype = "010011101001".parse().unwrap();
        let direct: f64 = (0..12).map(|i| l.site_table(i)[g.get(i) as usize]).sum::<f64>() / 12.0;
        assert!((l.fitness(&g) - direct).abs() < 1e-15);
    }

    #[test]
    fn k0_optimum_is_per_site_argmax() {
        let l = generate_nk(12, 0, 8).unwrap();
        let mut expect = Genotype::zeros(12);
        for i in 0..12 {
            let t = l.site_table(i);
            expect.set(i, t[1] >= t[0]);
        }
        assert_eq!(l.global_max().0, expect);
        assert_eq!(l.global_max().1, l.fitness(&expect));
    }

    #[test]
    fn dp_matches_enumeration_small() {
        for seed in 0..20 {
            for &(n, k) in &[(6, 5), (8, 1), (9, 4), (10, 7)] {
                let l = generate_nk(n, k, seed).unwrap();
                let brute = Genotype::all(n)
                    .max_by(|a, b| l.fitness(a).total_cmp(&l.fitness(b)))
                    .unwrap();
                assert_eq!(global_maximum_dp(&l).0, brute, "n={n} k={k} seed={seed}");
            }
        }
    }

    #[test]
    fn length_mismatch_is_parameter_error() {
        let l = generate_nk(12, 2, 0).unwrap();
        assert!(matches!(l.nk_fitness(&Genotype::zeros(11)), Err(Error::Parameter(_))));
    }

    #[test]
    fn from_tables_rejects_out_of_range() {
        let mut t = generate_nk(6, 1, 0).unwrap().tables().to_vec();
        t[3] = 1.0;
        assert!(NkLandscape::from_tables(6, 1, 0, t).is_err());
    }
}
