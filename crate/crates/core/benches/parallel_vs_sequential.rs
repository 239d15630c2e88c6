use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cf2::algrel::{find_relation_with, BitMatrix};
use cf2::cfmat::{g_tower_limits, SpecializationMap};
use cf2::identity::{check_prop_main_all, CheckConfig};
use cf2::par::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn identity_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("identity_trials");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = CheckConfig { trials: 100, exec, ..CheckConfig::default() };
        group.bench_function(BenchmarkId::new(name, "prop_main_len8"), |b| {
            b.iter(|| black_box(check_prop_main_all(8, &cfg)))
        });
    }
    group.finish();
}

fn random_matrix(n: usize, seed: u64) -> BitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = BitMatrix::new(n);
    for _ in 0..n {
        let r = m.push_zero_row();
        for c in 0..n {
            if rng.gen::<bool>() {
                m.flip(r, c);
            }
        }
    }
    m
}

fn elimination(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf2_elimination");
    group.sample_size(10);
    for n in [512, 2048] {
        let m = random_matrix(n, n as u64);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| b.iter(|| black_box(m.clone().kernel(exec))));
        }
    }
    group.finish();
}

fn relation_search(c: &mut Criterion) {
    let sp = SpecializationMap::default_binary();
    let spec = "G u0=0 v0=1 ups=011".parse().unwrap();
    let phi = g_tower_limits(&spec, &sp, 512).unwrap().cf;
    let mut group = c.benchmark_group("relation_search");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, "degx8_degz32"), |b| {
            b.iter(|| black_box(find_relation_with(&phi, 8, 32, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, identity_trials, elimination, relation_search);
criterion_main!(benches);
