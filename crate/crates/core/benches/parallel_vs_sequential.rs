use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rikit::corpus::{rearranged_corpus, DEFAULT_SEED};
use rikit::homogeneity::{endpoint_constant, homogeneity_report, HomogeneityOptions};
use rikit::lorentz::Mode;
use rikit::{Execution, NormFunctional};

fn executions() -> Vec<Execution> {
    let mut out = vec![Execution::Sequential];
    if Execution::parallel_available() {
        out.push(Execution::Parallel);
    }
    out
}

fn bench_homogeneity(c: &mut Criterion) {
    let norm = NormFunctional::lorentz(2.0, 3.0, Mode::DoubleStar).unwrap();
    let corpus = rearranged_corpus(DEFAULT_SEED, 16);
    let rs: Vec<f64> = (-6..=6).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let mut group = c.benchmark_group("homogeneity_report");
    group.sample_size(10);
    for exec in executions() {
        let opts = HomogeneityOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &opts,
            |b, opts| b.iter(|| homogeneity_report(&norm, black_box(&corpus), &rs, *opts).unwrap()),
        );
    }
    group.finish();
}

fn bench_corpus_sweep(c: &mut Criterion) {
    let norm = NormFunctional::lorentz(2.0, 2.0, Mode::DoubleStar).unwrap();
    let corpus = rearranged_corpus(DEFAULT_SEED, 200);
    let mut group = c.benchmark_group("endpoint_constant");
    group.sample_size(10);
    for exec in executions() {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, exec| b.iter(|| endpoint_constant(&norm, 2.0, black_box(&corpus), *exec).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_homogeneity, bench_corpus_sweep);
criterion_main!(benches);
