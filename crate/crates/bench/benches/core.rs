use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nnil_core::acceptance::normal_form_sample;
use nnil_core::morphisms::find_monotonic;
use nnil_core::universal::{canonical_tree, generate};
use nnil_core::{corpus, fmp, prover, random, VarContext};

fn universal(c: &mut Criterion) {
    c.bench_function("generate/2", |b| b.iter(|| generate(black_box(2)).unwrap()));

    let mut rng = random::rng(1);
    let trees: Vec<_> = (0..50).map(|_| random::tree(&mut rng, 2, 10)).collect();
    c.bench_function("canonical_tree/50x10", |b| {
        b.iter(|| {
            for t in &trees {
                black_box(canonical_tree(t));
            }
        })
    });
}

fn morphisms(c: &mut Criterion) {
    let models = corpus::models_upto(3, 2, true);
    c.bench_function("find_monotonic/rooted3", |b| {
        b.iter(|| {
            let mut found = 0;
            for a in &models {
                for m in &models {
                    found += usize::from(find_monotonic(a, m).is_some());
                }
            }
            found
        })
    });
}

fn proving(c: &mut Criterion) {
    let sample = normal_form_sample();
    c.bench_function("prover/sample", |b| {
        b.iter(|| sample.iter().filter(|f| prover::proves(&[], f)).count())
    });
}

fn reductions(c: &mut Criterion) {
    let mut rng = random::rng(2);
    let models: Vec<_> = (0..50)
        .map(|_| random::rooted_model(&mut rng, 2, 10))
        .collect();
    c.bench_function("reduce/50x10", |b| {
        b.iter(|| {
            for m in &models {
                black_box(fmp::reduce(m).unwrap());
            }
        })
    });

    let ctx = VarContext::standard(2);
    let frames = corpus::rooted_frames_upto(4);
    let forms: Vec<_> = normal_form_sample()
        .iter()
        .map(|f| fmp::frame_normal_form(f, &ctx).unwrap())
        .collect();
    c.bench_function("frame_validates_prime/4", |b| {
        b.iter(|| {
            let mut valid = 0;
            for fnf in &forms {
                for fr in &frames {
                    valid += usize::from(fmp::frame_validates_prime(fr, fnf));
                }
            }
            valid
        })
    });
}

criterion_group!(benches, universal, morphisms, proving, reductions);
criterion_main!(benches);
