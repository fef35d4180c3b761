//! Sequential vs rayon-parallel timings for the data-parallel inner loops:
//! vocabulary counting, remap application and pooled similarity ranking.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use overlap_core::corpus::{extract_language_vocab_seq, TokenizedCorpus};
use overlap_core::embed::{build_ranking_seq, DumpSet};
use overlap_core::remap::{apply_remap_seq, build_remap, native_overlap};
use overlap_core::synth::{
    generate_synthetic_pair, planted_dump, PlantedDumpConfig, SyntheticConfig,
};
use overlap_core::types::{OverlapSetting, TokenId};

#[cfg(feature = "parallel")]
use overlap_core::corpus::extract_language_vocab_par;
#[cfg(feature = "parallel")]
use overlap_core::embed::build_ranking_par;
#[cfg(feature = "parallel")]
use overlap_core::remap::apply_remap_par;

fn bench_corpus() -> TokenizedCorpus {
    let pair = generate_synthetic_pair(&SyntheticConfig {
        vocab_size: 4000,
        docs_per_language: 4000,
        doc_length: 256,
        cognate_fraction: 0.5,
        seed: 11,
    })
    .expect("valid config");
    pair.c2
}

fn bench_vocab_counting(c: &mut Criterion) {
    let corpus = bench_corpus();
    let mut group = c.benchmark_group("extract_language_vocab");
    group.bench_function("seq", |b| {
        b.iter(|| black_box(extract_language_vocab_seq(black_box(&corpus))))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| black_box(extract_language_vocab_par(black_box(&corpus))))
    });
    group.finish();
}

fn bench_apply_remap(c: &mut Criterion) {
    let pair = generate_synthetic_pair(&SyntheticConfig {
        vocab_size: 4000,
        docs_per_language: 4000,
        doc_length: 256,
        cognate_fraction: 0.5,
        seed: 11,
    })
    .expect("valid config");
    let v1 = overlap_core::corpus::extract_language_vocab(&pair.c1);
    let v2 = overlap_core::corpus::extract_language_vocab(&pair.c2);
    let partition = native_overlap(&v1, &v2);
    let table = build_remap(
        &v1,
        &v2,
        &partition,
        OverlapSetting::None,
        4000,
        &Default::default(),
    )
    .expect("valid remap");
    let mut group = c.benchmark_group("apply_remap");
    group.bench_function("seq", |b| {
        b.iter(|| black_box(apply_remap_seq(&table, black_box(&pair.c2)).unwrap()))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| black_box(apply_remap_par(&table, black_box(&pair.c2)).unwrap()))
    });
    group.finish();
}

fn bench_ranking(c: &mut Criterion) {
    let gold: std::collections::BTreeMap<TokenId, bool> =
        (0..512u32).map(|t| (TokenId(t), t % 2 == 0)).collect();
    let records = planted_dump(
        &gold,
        &PlantedDumpConfig {
            dim: 64,
            occurrences: 32,
            noise_sigma: 0.1,
            layers: vec![5],
            planted_layer: 5,
            seed: 3,
        },
    )
    .expect("valid dump config");
    let dumps = DumpSet::from_records(records).expect("consistent records");
    let dump = dumps.single_layer().expect("one layer");
    let tokens = dump.tokens_in_both();
    let mut group = c.benchmark_group("build_ranking");
    group.bench_function("seq", |b| {
        b.iter(|| black_box(build_ranking_seq(dump, black_box(&tokens), 100).unwrap()))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| black_box(build_ranking_par(dump, black_box(&tokens), 100).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_vocab_counting, bench_apply_remap, bench_ranking);
criterion_main!(benches);
