//! Benchmarks comparing the rayon-backed data-parallel paths against their
//! sequential counterparts, plus the raw classification throughput.
//!
//! Run with `cargo bench -p owlproofs-core`. Building without the default
//! `parallel` feature makes both sides sequential.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::hint::black_box;

use owlproofs_core::dataset::{select_conclusions, BuildConfig, DatasetBuilder};
use owlproofs_core::exec::{map_collect, map_collect_seq};
use owlproofs_core::model::{Axiom, Concept, Ontology};
use owlproofs_core::reasoner::{classify, EntailmentChecker};
use owlproofs_core::runner::{gold_response, Task};
use owlproofs_core::score::score_sample;
use owlproofs_core::similarity::SimilarityProvider;
use owlproofs_core::synth;
use owlproofs_core::verbalize::Lexicon;

fn bench_differential(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ontologies: Vec<Ontology> =
        (0..200).map(|_| synth::random_small_ontology(&mut rng, 6, 4, 2)).collect();
    let queries: Vec<Axiom> = (0..4)
        .flat_map(|a| (0..4).filter(move |&b| a != b).map(move |b| (a, b)))
        .map(|(a, b)| {
            Axiom::sub_class_of(Concept::atom(format!("N{a}")), Concept::atom(format!("N{b}")))
        })
        .collect();
    let work = |ontology: &Ontology| {
        let checker = EntailmentChecker::new(ontology);
        queries.iter().filter(|q| checker.entails(q)).count()
    };

    let mut group = c.benchmark_group("entailment_batch");
    group.bench_function(BenchmarkId::new("parallel", ontologies.len()), |b| {
        b.iter(|| black_box(map_collect(&ontologies, work)))
    });
    group.bench_function(BenchmarkId::new("sequential", ontologies.len()), |b| {
        b.iter(|| black_box(map_collect_seq(&ontologies, work)))
    });
    group.finish();
}

fn bench_goal_packaging(c: &mut Criterion) {
    let ontology = synth::chain_family(60, 12, 3);
    let builder =
        DatasetBuilder::new(&ontology, Lexicon::new(), SimilarityProvider::TfIdfCosine).unwrap();
    let taxonomy = builder.taxonomy();
    let cfg = BuildConfig {
        distance_range: (3, 8),
        per_distance_quota: 4,
        seed: 3,
        ..BuildConfig::default()
    };
    let selection = select_conclusions(&taxonomy, &cfg, cfg.seed);
    let work = |goal: &owlproofs_core::dataset::SelectedConclusion| {
        builder.package_goal(goal, &cfg).map(|p| p.justification.axioms.len()).unwrap_or(0)
    };

    let mut group = c.benchmark_group("goal_packaging");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", selection.goals.len()), |b| {
        b.iter(|| black_box(map_collect(&selection.goals, work)))
    });
    group.bench_function(BenchmarkId::new("sequential", selection.goals.len()), |b| {
        b.iter(|| black_box(map_collect_seq(&selection.goals, work)))
    });
    group.finish();
}

fn bench_scoring(c: &mut Criterion) {
    let ontology = synth::chain_family(60, 12, 5);
    let builder =
        DatasetBuilder::new(&ontology, Lexicon::new(), SimilarityProvider::TfIdfCosine).unwrap();
    let taxonomy = builder.taxonomy();
    let cfg = BuildConfig {
        distance_range: (3, 8),
        per_distance_quota: 8,
        seed: 5,
        ..BuildConfig::default()
    };
    let output =
        owlproofs_core::dataset::build_dataset(&builder, &taxonomy, &cfg, "bench").unwrap();
    let samples = &output.groups[0].samples;
    let responses: BTreeMap<String, String> = samples
        .iter()
        .map(|s| (s.id.clone(), gold_response(s, Task::Standard)))
        .collect();
    let work = |sample: &owlproofs_core::io::sample::EvalSample| {
        score_sample(sample, &responses[&sample.id]).format_ok
    };

    let mut group = c.benchmark_group("score_batch");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", samples.len()), |b| {
        b.iter(|| black_box(map_collect(samples, work)))
    });
    group.bench_function(BenchmarkId::new("sequential", samples.len()), |b| {
        b.iter(|| black_box(map_collect_seq(samples, work)))
    });
    group.finish();
}

fn bench_classification(c: &mut Criterion) {
    let nf = synth::layered_normal_forms(10_000, 512, 9);
    let mut group = c.benchmark_group("classification");
    group.sample_size(10);
    group.bench_function("layered_10k", |b| b.iter(|| black_box(classify(&nf))));
    group.finish();
}

criterion_group!(
    benches,
    bench_differential,
    bench_goal_packaging,
    bench_scoring,
    bench_classification
);
criterion_main!(benches);
