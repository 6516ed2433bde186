use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use emoprompt_bench::{noisy, sentence, utterance};
use emoprompt_core::selection::consensus_rank;
use emoprompt_core::textmetrics::{chrf, chrf_pp, word_align, MetricId};

fn pairs(c: &mut Criterion) {
    let mut g = c.benchmark_group("pair");
    for len in [8, 32, 128] {
        let r = sentence(1, "ref", len);
        let h = noisy(&r, 1, "hyp");
        g.bench_with_input(BenchmarkId::new("word_align", len), &len, |b, _| {
            b.iter(|| word_align(black_box(&h), black_box(&r)))
        });
        g.bench_with_input(BenchmarkId::new("chrf", len), &len, |b, _| b.iter(|| chrf(black_box(&h), black_box(&r))));
        g.bench_with_input(BenchmarkId::new("chrf_pp", len), &len, |b, _| {
            b.iter(|| chrf_pp(black_box(&h), black_box(&r)))
        });
    }
    g.finish();
}

fn consensus(c: &mut Criterion) {
    let mut g = c.benchmark_group("consensus_11");
    let u = utterance("u1", 16, 7);
    let cands = u.candidates();
    for m in MetricId::ALL {
        g.bench_function(m.token(), |b| b.iter(|| consensus_rank(black_box(&cands), m).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, pairs, consensus);
criterion_main!(benches);
