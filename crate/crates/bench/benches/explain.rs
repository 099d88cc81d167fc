use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use motif_shap::{approx_explain, exact_explain, ExplainConfig, GroundTruthScorer, MaskingStrategy};
use motif_shap_bench::dataset;

fn lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_explain");
    group.sample_size(20);
    for m in [6, 8, 12] {
        let data = dataset(2, m, 1);
        let bb = GroundTruthScorer::with_default_beta(100, &data.motifs, vec![1.0 / m as f64; m]).unwrap();
        let g = data.dataset.graph(0);
        for mask in [MaskingStrategy::toggle(), MaskingStrategy::average(&data.dataset).unwrap()] {
            group.bench_with_input(BenchmarkId::new(mask.kind().name(), m), &m, |b, _| {
                b.iter(|| exact_explain(g, &bb, &data.motifs, &mask, &ExplainConfig::default()).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("approx_explain_depth1");
    let data = dataset(2, 16, 2);
    let bb = GroundTruthScorer::with_default_beta(100, &data.motifs, vec![1.0 / 16.0; 16]).unwrap();
    group.bench_function("16", |b| {
        b.iter(|| {
            approx_explain(
                data.dataset.graph(0),
                &bb,
                &data.motifs,
                &MaskingStrategy::toggle(),
                1,
                &ExplainConfig::default(),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, lattice);
criterion_main!(benches);
