//! Sequential vs parallel evaluation of the randomized gluing suite and of
//! closed-form characterizations.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cesmul_core::exec;
use cesmul_core::gluing::{glue_eval, suite_config, GlueGenerator, GlueInstance, LemmaId};
use cesmul_core::multiplier::characterize;
use cesmul_core::suite::regime_instances;
use cesmul_core::QuadratureConfig;

fn glue_instances(n: usize) -> Vec<GlueInstance> {
    let gen = GlueGenerator::default();
    LemmaId::ALL
        .iter()
        .flat_map(|&l| (0..n as u64).map(move |s| (l, s)))
        .map(|(l, s)| gen.instance(l, s))
        .collect()
}

fn bench_glue(c: &mut Criterion) {
    let cfg = suite_config();
    let mut group = c.benchmark_group("glue_suite");
    group.sample_size(10);
    for n in [4usize, 16] {
        let insts = glue_instances(n);
        group.bench_with_input(BenchmarkId::new("seq", insts.len()), &insts, |b, insts| {
            b.iter(|| exec::seq_map(insts, |i| glue_eval(i, &cfg).map(|r| r.lhs).unwrap_or(f64::NAN)))
        });
        group.bench_with_input(BenchmarkId::new("par", insts.len()), &insts, |b, insts| {
            b.iter(|| exec::par_map(insts, |i| glue_eval(i, &cfg).map(|r| r.lhs).unwrap_or(f64::NAN)))
        });
    }
    group.finish();
}

fn bench_characterize(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let probs: Vec<_> = regime_instances().into_iter().map(|i| i.problem).collect();
    let mut group = c.benchmark_group("characterize");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| exec::seq_map(&probs, |p| characterize(p, &cfg).map(|r| r.value).unwrap_or(f64::NAN)))
    });
    group.bench_function("par", |b| {
        b.iter(|| exec::par_map(&probs, |p| characterize(p, &cfg).map(|r| r.value).unwrap_or(f64::NAN)))
    });
    group.finish();
}

criterion_group!(benches, bench_glue, bench_characterize);
criterion_main!(benches);
