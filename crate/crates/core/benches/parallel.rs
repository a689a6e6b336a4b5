use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use khcube::khovanov::{build_khovanov_functor, khovanov_homology, parse_pd, PdCode};
use khcube::par;

fn diagram(name: &str) -> PdCode {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/pd").join(format!("{name}.pd"));
    parse_pd(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn khovanov(c: &mut Criterion) {
    let mut group = c.benchmark_group("khovanov");
    group.sample_size(10);
    for name in ["trefoil_kink", "granny", "trefoil_figure_eight"] {
        let pd = diagram(name);
        for (label, on) in [("sequential", false), ("parallel", true)] {
            group.bench_with_input(BenchmarkId::new(format!("build/{label}"), name), &pd, |b, pd| {
                par::set_enabled(on);
                b.iter(|| build_khovanov_functor(pd).unwrap());
            });
            let k = build_khovanov_functor(&pd).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("homology/{label}"), name), &k, |b, k| {
                par::set_enabled(on);
                b.iter(|| khovanov_homology(k).unwrap());
            });
        }
    }
    par::set_enabled(true);
    group.finish();
}

criterion_group!(benches, khovanov);
criterion_main!(benches);
