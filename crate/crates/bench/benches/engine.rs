use std::hint::black_box;
use std::sync::atomic::AtomicBool;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mshot_bench::{pigeonhole, random_programs, toh_ground, toh_horizon};
use mshot_core::solver::random::RandomSpec;
use mshot_core::solver::{solve, SolverConfig};
use mshot_core::{Engine, EnumMode, SolveOptions};

fn grounding(c: &mut Criterion) {
    let mut g = c.benchmark_group("ground_toh");
    for horizon in [7, 15] {
        g.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| black_box(toh_ground(4, h)))
        });
    }
    g.finish();
}

fn incremental(c: &mut Criterion) {
    let mut g = c.benchmark_group("toh_incremental");
    g.sample_size(10);
    for disks in [3, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(disks), &disks, |b, &d| b.iter(|| toh_horizon(d)));
    }
    g.finish();
}

fn pigeons(c: &mut Criterion) {
    let mut g = c.benchmark_group("pigeonhole_unsat");
    g.sample_size(10);
    for holes in [5, 6] {
        let text = pigeonhole(holes + 1, holes);
        g.bench_with_input(BenchmarkId::from_parameter(holes), &text, |b, text| {
            b.iter(|| {
                let mut e = Engine::new();
                e.load(text).unwrap();
                e.ground("base", vec![]).unwrap();
                e.solve(SolveOptions::default(), |_| true).unwrap()
            })
        });
    }
    g.finish();
}

fn random(c: &mut Criterion) {
    let programs = random_programs(200, &RandomSpec { max_atoms: 30, max_rules: 60, ..RandomSpec::default() });
    let config = SolverConfig::default();
    c.bench_function("random_enumerate_200", |b| {
        b.iter(|| {
            let cancel = AtomicBool::new(false);
            let mut n = 0;
            for p in &programs {
                solve(p, EnumMode::All, None, &config, &cancel, &mut |_| {
                    n += 1;
                    true
                });
            }
            n
        })
    });
}

criterion_group!(benches, grounding, incremental, pigeons, random);
criterion_main!(benches);
