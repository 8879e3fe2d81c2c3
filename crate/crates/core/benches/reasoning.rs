use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use reasongraph::reason::{infer, Exec, ReasonerParams};
use reasongraph::synth::path_instance;

fn bench_infer(c: &mut Criterion) {
    let mut group = c.benchmark_group("infer");
    group.sample_size(10);
    for n in [20usize, 40] {
        let inst = path_instance(n, 0.9).unwrap();
        let x0 = inst.x0();
        let w = inst.weights();
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            let p = ReasonerParams { gamma: 0.01, steps: 5, exec };
            group.bench_with_input(BenchmarkId::new(name, inst.graph.n_conj()), &p, |b, p| {
                b.iter(|| infer(&x0, &inst.graph, &w, p).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_infer);
criterion_main!(benches);
