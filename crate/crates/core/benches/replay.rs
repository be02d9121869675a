use std::path::PathBuf;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use chirono_core::chart::Deck;
use chirono_core::trace::{list_corpus, replay_all, replay_all_sequential, Trace};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn corpus_replay(c: &mut Criterion) {
    let deck = Arc::new(Deck::load(&fixtures().join("deck/scenes.json")).expect("demo deck"));
    let traces: Vec<Trace> = list_corpus(&fixtures().join("corpus"))
        .expect("corpus directory")
        .iter()
        .map(|e| Trace::load(&e.path).expect("corpus trace"))
        .collect();

    let mut group = c.benchmark_group("corpus_replay");
    group.sample_size(20);
    group.bench_function("sequential", |b| b.iter(|| replay_all_sequential(&traces, &deck)));
    group.bench_function("parallel", |b| b.iter(|| replay_all(&traces, &deck)));
    group.finish();
}

criterion_group!(benches, corpus_replay);
criterion_main!(benches);
