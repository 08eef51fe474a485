use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use inexpress::certificate::{extract_certificate, verify_certificate};
use inexpress::game::{decide_game, refuter_to_transducer};
use inexpress::oracle::landweber_check;
use inexpress::separation::{approx_start, approx_step, decide, Options};
use inexpress::fixtures::finitely_many_a;
use inexpress::make_gamma;
use inexpress_bench::{corpus_sample, games};

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    for (name, mode, g) in games() {
        group.bench_function(name, |b| b.iter(|| decide_game(black_box(&mode), &g, None).unwrap()));
    }
    group.finish();
}

fn certificates(c: &mut Criterion) {
    let mut group = c.benchmark_group("certificate");
    for (name, mode, g) in games() {
        let v = decide_game(&mode, &g, None).unwrap();
        let Ok(r) = refuter_to_transducer(&v) else { continue };
        let Ok(cert) = extract_certificate(&r, &g, &mode) else { continue };
        group.bench_function(format!("extract/{name}"), |b| b.iter(|| extract_certificate(black_box(&r), &g, &mode).unwrap()));
        group.bench_function(format!("verify/{name}"), |b| b.iter(|| verify_certificate(black_box(&cert), &mode).unwrap()));
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let corpus = corpus_sample();
    let dbw = make_gamma("dbw").unwrap();
    let mut group = c.benchmark_group("corpus");
    group.sample_size(10);
    group.bench_function("landweber", |b| b.iter(|| corpus.iter().filter(|a| landweber_check(a)).count()));
    group.bench_function("game", |b| {
        b.iter(|| corpus.iter().filter(|a| decide(&inexpress::Mode::recognize((*a).clone()), &dbw, &Options::default()).unwrap().decision.is_positive()).count())
    });
    group.finish();
}

fn approximation(c: &mut Criterion) {
    let dbw = make_gamma("dbw").unwrap();
    let l = finitely_many_a();
    let mut group = c.benchmark_group("approximation");
    group.sample_size(10);
    group.bench_function("start", |b| b.iter(|| approx_start(black_box(&l), &dbw).unwrap()));
    group.bench_function("step-c2", |b| {
        b.iter_batched(|| approx_start(&l, &dbw).unwrap(), |s| approx_step(s, "C2").unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, solve, certificates, oracle, approximation);
criterion_main!(benches);
