use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dnorm_core::sample;
use dnorm_core::{
    bruteforce_diamond, diamond_norm, encode, membership, BruteForceConfig, FeasibleSetSpec,
    Objective, SolverConfig, SolverMode, StinespringPair,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channel(n: usize) -> StinespringPair {
    sample::random_channel_difference(n, 2, &mut ChaCha8Rng::seed_from_u64(1))
}

fn oracles(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [2usize, 4, 8] {
        let set = FeasibleSetSpec::states(n).unwrap();
        let x = encode(&sample::random_density(n, &mut rng)).unwrap();
        c.bench_function(&format!("membership/N={n}"), |b| {
            b.iter(|| membership(&set, black_box(x.as_slice()), 1e-3).unwrap())
        });
    }
    for n in [2usize, 4] {
        let obj = Objective::new(&channel(n)).unwrap();
        let x = encode(&sample::random_density(n, &mut rng)).unwrap();
        let y = encode(&sample::random_density(n, &mut rng)).unwrap();
        c.bench_function(&format!("g_oracle/N={n}"), |b| {
            b.iter(|| obj.g_oracle(black_box(x.as_slice()), y.as_slice(), 1e-3).unwrap())
        });
    }
}

fn solves(c: &mut Criterion) {
    let mut g = c.benchmark_group("diamond_norm");
    g.sample_size(10);
    let p = channel(2);
    for eps in [1e-2, 1e-3] {
        g.bench_function(format!("qubit/eps={eps}"), |b| {
            b.iter(|| diamond_norm(black_box(&p), &SolverConfig::new(eps)).unwrap())
        });
    }
    g.bench_function("qubit/membership-only/eps=1e-2", |b| {
        let cfg = SolverConfig::new(1e-2).with_mode(SolverMode::MembershipOnly);
        b.iter(|| diamond_norm(black_box(&p), &cfg).unwrap())
    });
    g.bench_function("qubit/bruteforce", |b| {
        b.iter(|| bruteforce_diamond(black_box(&p), &BruteForceConfig::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, oracles, solves);
criterion_main!(benches);
