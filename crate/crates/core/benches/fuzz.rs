use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use germtools::harness::{fuzz_theorems_with, Execution, FuzzOptions, GeneratorConfig};

fn fuzz(c: &mut Criterion) {
    let mut group = c.benchmark_group("fuzz_theorems");
    group.sample_size(10);
    for (n, d) in [(2, 3), (3, 3)] {
        let cfg = GeneratorConfig::new(n, d, 1, 64);
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let options = FuzzOptions { execution, record_timing: false };
            group.bench_with_input(BenchmarkId::new(label, format!("n{n}_d{d}")), &cfg, |b, cfg| {
                b.iter(|| fuzz_theorems_with(cfg, &options).expect("valid config"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fuzz);
criterion_main!(benches);
