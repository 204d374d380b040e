use nk_arena::analytics::BlindSearchModel;
use nk_arena::landscape::io::{load_landscape, save_landscape, LoadError};
use nk_arena::landscape::{generate_nk, Landscape};
use nk_arena::search::run_search;
use nk_arena::{Algorithm, Genotype, SearchConfig};

fn halting_times(algorithm: Algorithm, n: usize, m: usize, u: f64, runs: u64) -> Vec<u64> {
    let l = generate_nk(n, 2, 11).unwrap();
    (0..runs)
        .map(|seed| {
            let config = SearchConfig::new(algorithm, m, u, u64::MAX, seed);
            run_search(&l, &config).unwrap().t_star().unwrap()
        })
        .collect()
}

/// Largest gap between the empirical and closed-form halting-time CDFs.
fn ks_distance(times: &[u64], model: &BlindSearchModel) -> f64 {
    let mut sorted = times.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let cdf = model.success_cdf(t as f64);
        let below = model.success_cdf(t as f64 - 1.0);
        worst = worst.max((cdf - (i + 1) as f64 / n).abs()).max((below - i as f64 / n).abs());
    }
    worst
}

// 1.63/sqrt(n) is the 1% critical value; discreteness only makes it conservative.
fn assert_geometric(times: &[u64], n: usize, m: usize) {
    let model = BlindSearchModel::single(n, m).unwrap();
    let d = ks_distance(times, &model);
    let critical = 1.63 / (times.len() as f64).sqrt();
    assert!(d < critical, "KS distance {d:.4} >= {critical:.4}");
    let mean = times.iter().sum::<u64>() as f64 / times.len() as f64;
    let se = (model.halting_variance() / times.len() as f64).sqrt();
    assert!((mean - model.mean_halting_time()).abs() < 4.0 * se, "{mean} vs {}", model.mean_halting_time());
}

#[test]
fn blind_search_halting_time_is_geometric() {
    assert_geometric(&halting_times(Algorithm::Bs, 8, 4, 0.0, 3000), 8, 4);
}

#[test]
fn half_mutation_rate_reduces_to_blind_search() {
    for algorithm in [Algorithm::Il, Algorithm::Aga, Algorithm::Sga] {
        assert_geometric(&halting_times(algorithm, 8, 4, 0.5, 2000), 8, 4);
    }
}

#[test]
fn best_so_far_never_drops_and_ends_at_the_maximum() {
    let l = generate_nk(10, 4, 5).unwrap();
    for algorithm in [Algorithm::Il, Algorithm::Aga, Algorithm::Sga, Algorithm::Bs, Algorithm::Raw] {
        for seed in 0..10 {
            let m = if algorithm == Algorithm::Raw { 1 } else { 8 };
            let r = run_search(&l, &SearchConfig::new(algorithm, m, 0.05, 200_000, seed)).unwrap();
            let points = r.best_trace.points();
            assert!(points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
            if r.success() {
                assert_eq!(r.best_trace.best(), l.global_max_fitness());
                assert_eq!(r.best_trace.best_at(r.t_end - 1), l.global_max_fitness());
            } else {
                assert!(r.best_trace.best() < l.global_max_fitness());
            }
        }
    }
}

#[test]
fn imitation_without_mutation_can_fixate() {
    // With u=0 a site on which both walkers agree can never change again.
    let l = generate_nk(12, 3, 9).unwrap();
    let (target, _) = l.global_max();
    let mut stalled = 0;
    for seed in 0..30 {
        let r = run_search(&l, &SearchConfig::new(Algorithm::Il, 2, 0.0, 5_000, seed)).unwrap();
        if !r.success() {
            stalled += 1;
        }
    }
    assert!(stalled > 0, "M=2 without mutation should sometimes fixate away from {target:?}");
}

#[test]
fn landscape_files_round_trip_bit_exactly() {
    let l = generate_nk(11, 5, 42).unwrap();
    let mut bytes = Vec::new();
    save_landscape(&l, &mut bytes).unwrap();
    let back = load_landscape(bytes.as_slice()).unwrap();
    assert_eq!(back.tables(), l.tables());
    assert_eq!(back.global_max(), l.global_max());
    for g in Genotype::all(11) {
        assert_eq!(back.fitness(&g).to_bits(), l.fitness(&g).to_bits());
    }

    let mut corrupt = bytes.clone();
    let mid = corrupt.len() / 2;
    corrupt[mid] ^= 0x40;
    assert!(matches!(load_landscape(corrupt.as_slice()), Err(LoadError::Checksum { .. })));

    assert!(matches!(
        load_landscape(&bytes[..bytes.len() - 9]),
        Err(LoadError::Truncated { .. } | LoadError::Checksum { .. } | LoadError::Io(_))
    ));

    let mut wrong_magic = bytes;
    wrong_magic[0] = b'X';
    assert!(matches!(load_landscape(wrong_magic.as_slice()), Err(LoadError::BadMagic { .. })));
}
