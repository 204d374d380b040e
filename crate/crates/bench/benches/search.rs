use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nk_arena::landscape::{generate_nk, global_maximum_dp, Landscape};
use nk_arena::rng;
use nk_arena::search::{init_population, step, run_search};
use nk_arena::{Algorithm, Genotype, SearchConfig};
use rand::Rng;

fn fitness(c: &mut Criterion) {
    let mut group = c.benchmark_group("fitness");
    // N=12 hits the precomputed table; N=32 evaluates the site tables.
    for (n, k) in [(12, 3), (32, 5)] {
        let l = generate_nk(n, k, 1).unwrap();
        let mut r = rng::stream(1, "bench", &[]);
        let gs: Vec<Genotype> = (0..1024).map(|_| Genotype::random(n, &mut r)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(format!("N{n}_K{k}")), &gs, |b, gs| {
            b.iter(|| gs.iter().map(|g| l.fitness(black_box(g))).sum::<f64>())
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let l = generate_nk(12, 9, 2).unwrap();
    let mut group = c.benchmark_group("step_m100");
    for algorithm in [Algorithm::Il, Algorithm::Aga, Algorithm::Sga, Algorithm::Bs] {
        let config = SearchConfig::new(algorithm, 100, 0.1, u64::MAX, 0);
        let mut r = rng::stream(2, "bench", &[]);
        let mut pop = init_population(100, &l, &mut r).unwrap();
        group.bench_function(algorithm.as_str(), |b| {
            b.iter(|| step(&mut pop, &l, &config, &mut r).unwrap())
        });
    }
    group.finish();
}

fn dp(c: &mut Criterion) {
    let mut group = c.benchmark_group("global_max_dp");
    for (n, k) in [(64, 4), (64, 8)] {
        let l = generate_nk(n, k, 3).unwrap();
        group.bench_function(format!("N{n}_K{k}"), |b| b.iter(|| global_maximum_dp(black_box(&l))));
    }
    group.finish();
}

fn full_run(c: &mut Criterion) {
    let l = generate_nk(12, 0, 4).unwrap();
    let mut seeds = rng::stream(4, "bench", &[]);
    c.bench_function("il_run_N12_K0_M20", |b| {
        b.iter(|| {
            let config = SearchConfig::new(Algorithm::Il, 20, 0.1, 1_000_000, seeds.gen());
            run_search(&l, &config).unwrap().t_end
        })
    });
}

criterion_group!(benches, fitness, generation, dp, full_run);
criterion_main!(benches);
