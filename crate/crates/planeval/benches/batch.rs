use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use planeval::batch::{self, Exec};
use planeval::corpus::{generate, ClassMix, CorpusSpec};
use planeval::evaluation::{BivarPoly, Chart};
use planeval::exactnum::{rat, rint, Rat};
use planeval::hn_model::Field;
use planeval::linear_systems::mu_d;
use planeval::minimality::{asymptotic_experiment_with, lipschitz_probe_with, VDeltaParams};

fn execs() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn asymptotic(c: &mut Criterion) {
    let ts: Vec<Rat> = (2..66).map(|i| rint(i * i + 1)).collect();
    let mut g = c.benchmark_group("asymptotic");
    for (name, exec) in execs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &ts, |b, ts| {
            b.iter(|| asymptotic_experiment_with(exec, black_box(ts)).unwrap())
        });
    }
    g.finish();
}

fn lipschitz(c: &mut Criterion) {
    let params = VDeltaParams::smooth();
    let f = BivarPoly::parse("v^3 - u^5 + u^2*v", Field::Q, Chart::Local).unwrap();
    let samples: Vec<Rat> = (0..48).map(|i| rint(1) + rat(i, 5)).collect();
    let mut g = c.benchmark_group("lipschitz");
    for (name, exec) in execs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &samples, |b, s| {
            b.iter(|| lipschitz_probe_with(exec, &params, &f, black_box(s)).unwrap())
        });
    }
    g.finish();
}

fn mu_corpus(c: &mut Criterion) {
    let spec = CorpusSpec { count: 32, max_rows: 3, max_h: 3, class: ClassMix::Divisorial, ..CorpusSpec::default() };
    let corpus = generate(&spec);
    let mut g = c.benchmark_group("mu_4");
    g.sample_size(20);
    for (name, exec) in execs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &corpus, |b, cs| {
            b.iter(|| batch::try_map(exec, cs, |hn| mu_d(hn, 4)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, asymptotic, lipschitz, mu_corpus);
criterion_main!(benches);
