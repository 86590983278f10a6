//! End-to-end benchmark construction: stratified conclusion sampling, minimal
//! justification extraction, similarity-ranked noise with a uniqueness
//! guarantee, mode variants and deterministic JSONL emission.
//!
//! The uniqueness guard checks, for an assembled axiom set `I = J ∪ N` and
//! every `j ∈ J`, that `I∖{j} ⊭ goal`. Passing it makes `J` the unique
//! justification inside the sample: any other justification would survive the
//! removal of some `j` and entail the goal from `I∖{j}`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::sample::{ConclusionText, EvalSample, SampleAxiom, SampleMode};
use crate::io::render_dl;
use crate::justify::{self, Budget, JustificationSet};
use crate::model::{Axiom, Concept, Ontology};
use crate::reasoner::EntailmentChecker;
use crate::similarity::{ProviderError, SimilarityProvider};
use crate::taxonomy::{build_taxonomy, TaxonomyGraph};
use crate::verbalize::{verbalize_axiom, verbalize_query, Lexicon};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("uniqueness guard unsatisfiable for {goal}: {reason}")]
    GuardUnsatisfiable { goal: String, reason: String },
    #[error("k = {k} exceeds the justification size {size}")]
    KTooLarge { k: u32, size: u32 },
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("goal unexpectedly not entailed")]
    NotEntailed(#[from] justify::NotEntailed),
    #[error("verbalization failed: {0}")]
    Verbalize(#[from] crate::verbalize::VerbalizeError),
}

/// Which sample families to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildMode {
    Standard,
    Hard,
    NaturalLanguage,
    JustOnly,
    Naming,
    Incomplete,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    pub distance_range: (u32, u32),
    pub per_distance_quota: usize,
    pub ratios: Vec<(u32, u32)>,
    pub seed: u64,
    pub modes: BTreeSet<BuildMode>,
    pub incomplete_k_range: (u32, u32),
    pub incomplete_min_distance: u32,
    pub hard_pool_per_distance: usize,
    pub hard_cap_per_cell: usize,
    /// Keep a hard case when `|J| - distance` is at least this gap.
    pub hard_min_gap: u32,
    pub max_justifications: usize,
    pub max_entailment_tests: usize,
    /// Score only the top-k noise candidates when set.
    pub noise_prefilter: Option<usize>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            distance_range: (4, 16),
            per_distance_quota: 20,
            ratios: vec![(1, 1)],
            seed: 0,
            modes: [BuildMode::Standard].into(),
            incomplete_k_range: (1, 4),
            incomplete_min_distance: 10,
            hard_pool_per_distance: 300,
            hard_cap_per_cell: 10,
            hard_min_gap: 3,
            max_justifications: 16,
            max_entailment_tests: 5_000,
            noise_prefilter: None,
        }
    }
}

impl BuildConfig {
    pub fn budget(&self) -> Budget {
        Budget { max_count: self.max_justifications, max_tests: self.max_entailment_tests }
    }
}

/// A stratified conclusion pick: goal, its atomic distance and a stable
/// sequence number inside the selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectedConclusion {
    pub goal: Axiom,
    pub distance: u32,
    pub seq: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub goals: Vec<SelectedConclusion>,
    /// `InsufficientPopulation` notes, one per under-filled distance.
    pub warnings: Vec<String>,
}

/// Uniform, seeded sampling of up to `quota` subsumptions per distance level.
pub fn select_conclusions(
    taxonomy: &TaxonomyGraph,
    cfg: &BuildConfig,
    seed: u64,
) -> Selection {
    let mut selection = Selection::default();
    let (lo, hi) = cfg.distance_range;
    let mut seq = 0usize;
    for distance in lo..=hi {
        let pairs = taxonomy.pairs_at_distance(distance);
        let picked: Vec<(String, String)> = if pairs.len() <= cfg.per_distance_quota {
            if pairs.len() < cfg.per_distance_quota {
                selection.warnings.push(format!(
                    "insufficient population at distance {distance}: {} of {} requested",
                    pairs.len(),
                    cfg.per_distance_quota
                ));
            }
            pairs
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(distance as u64);
            let mut chosen =
                rand::seq::index::sample(&mut rng, pairs.len(), cfg.per_distance_quota)
                    .into_vec();
            chosen.sort_unstable();
            chosen.into_iter().map(|i| pairs[i].clone()).collect()
        };
        for (sub, sup) in picked {
            selection.goals.push(SelectedConclusion {
                goal: Axiom::sub_class_of(Concept::atom(sub), Concept::atom(sup)),
                distance,
                seq,
            });
            seq += 1;
        }
    }
    selection
}

/// One processed goal: its minimal justification and ranked noise candidates.
#[derive(Debug, Clone)]
pub struct GoalPackage {
    pub conclusion: SelectedConclusion,
    pub justification: JustificationSet,
    pub truncated: bool,
    pub ranked_noise: Vec<usize>,
}

/// Everything needed to assemble samples from one ontology.
pub struct DatasetBuilder<'a> {
    pub ontology: &'a Ontology,
    pub checker: EntailmentChecker<'a>,
    pub lexicon: Lexicon,
    provider: SimilarityProvider,
    /// Verbalized sentence per axiom index.
    sentences: Vec<String>,
}

impl<'a> DatasetBuilder<'a> {
    pub fn new(
        ontology: &'a Ontology,
        lexicon: Lexicon,
        provider: SimilarityProvider,
    ) -> Result<Self, BuildError> {
        let sentences = ontology
            .iter()
            .map(|(_, axiom)| verbalize_axiom(axiom, &lexicon))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DatasetBuilder {
            ontology,
            checker: EntailmentChecker::new(ontology),
            lexicon,
            provider,
            sentences,
        })
    }

    pub fn taxonomy(&self) -> TaxonomyGraph {
        build_taxonomy(&crate::reasoner::classify_ontology(self.ontology))
    }

    /// Ranks all axioms outside `exclude` by descending similarity between
    /// the goal's query sentence and each axiom sentence; ties break on the
    /// smaller index.
    pub fn rank_noise(
        &self,
        goal: &Axiom,
        exclude: &BTreeSet<usize>,
        prefilter: Option<usize>,
    ) -> Result<Vec<usize>, BuildError> {
        let query = verbalize_query(goal, &self.lexicon)?;
        let candidates: Vec<usize> =
            (0..self.ontology.len()).filter(|i| !exclude.contains(i)).collect();
        let sentences: Vec<String> =
            candidates.iter().map(|&i| self.sentences[i].clone()).collect();
        let scores = self.provider.scores(&query, &sentences)?;
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&x, &y| {
            scores[y]
                .total_cmp(&scores[x])
                .then_with(|| candidates[x].cmp(&candidates[y]))
        });
        let mut ranked: Vec<usize> = order.into_iter().map(|i| candidates[i]).collect();
        if let Some(k) = prefilter {
            ranked.truncate(k);
        }
        Ok(ranked)
    }

    /// Computes justification and noise ranking for one selected conclusion.
    pub fn package_goal(
        &self,
        conclusion: &SelectedConclusion,
        cfg: &BuildConfig,
    ) -> Result<GoalPackage, BuildError> {
        let (justification, truncated) =
            justify::min_size_justification(&self.checker, &conclusion.goal, cfg.budget())?;
        let ranked_noise =
            self.rank_noise(&conclusion.goal, &justification.axioms, cfg.noise_prefilter)?;
        Ok(GoalPackage {
            conclusion: conclusion.clone(),
            justification,
            truncated,
            ranked_noise,
        })
    }

    /// Assembles one sample at the given noise ratio, enforcing the
    /// leave-one-out uniqueness guard. When the guard fails, the culprit
    /// noise axiom supporting the alternative proof is dropped (lowest-ranked
    /// first) and the pool is refilled to keep exactly `n·|J|` noise axioms.
    pub fn assemble_sample(
        &self,
        package: &GoalPackage,
        ratio: (u32, u32),
        mode: SampleMode,
        id: String,
        sample_seed: u64,
    ) -> Result<EvalSample, BuildError> {
        let goal = &package.conclusion.goal;
        let gold: Vec<usize> = package.justification.axioms.iter().copied().collect();
        let needed = (ratio.1 as usize) * gold.len();
        let guard_fail = |reason: &str| BuildError::GuardUnsatisfiable {
            goal: goal.to_string(),
            reason: reason.to_string(),
        };

        if package.ranked_noise.len() < needed {
            return Err(guard_fail(&format!(
                "only {} noise candidates for {} slots",
                package.ranked_noise.len(),
                needed
            )));
        }

        let prepared = self.checker.prepare(goal);
        let mut accepted: Vec<usize> = package.ranked_noise[..needed].to_vec();
        let mut next = needed;
        loop {
            // Leave-one-out guard over the assembled set.
            let violating = gold.iter().copied().find(|&j| {
                let subset = accepted.iter().chain(gold.iter()).copied().filter(|&a| a != j);
                self.checker.entails_subset(&prepared, subset)
            });
            let Some(j) = violating else { break };

            // An alternative proof lives inside I∖{j}; shrink to expose it
            // and ban its lowest-ranked noise member.
            let without: Vec<usize> = accepted
                .iter()
                .chain(gold.iter())
                .copied()
                .filter(|&a| a != j)
                .collect();
            let alt = justify::shrink(&self.checker, goal, &without)
                .map_err(|_| guard_fail("alternative proof vanished during shrink"))?;
            let culprit_pos = accepted
                .iter()
                .rposition(|a| alt.axioms.contains(a))
                .ok_or_else(|| guard_fail("alternative proof uses no noise axiom"))?;
            accepted.remove(culprit_pos);
            loop {
                if next >= package.ranked_noise.len() {
                    return Err(guard_fail("noise pool exhausted while re-filling"));
                }
                let candidate = package.ranked_noise[next];
                next += 1;
                if !accepted.contains(&candidate) {
                    accepted.push(candidate);
                    break;
                }
            }
        }

        // Shuffle gold and noise together, then re-index densely.
        let mut order: Vec<(usize, bool)> = gold
            .iter()
            .map(|&i| (i, true))
            .chain(accepted.iter().map(|&i| (i, false)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
        order.shuffle(&mut rng);

        let mut axioms = Vec::with_capacity(order.len());
        let mut gold_justification = BTreeSet::new();
        let mut noise = BTreeSet::new();
        for (new_idx, &(orig_idx, is_gold)) in order.iter().enumerate() {
            let axiom = self.ontology.axiom(orig_idx);
            axioms.push(SampleAxiom {
                idx: new_idx as u32,
                dl: render_dl(axiom),
                nl: self.sentences[orig_idx].clone(),
            });
            if is_gold {
                gold_justification.insert(new_idx as u32);
            } else {
                noise.insert(new_idx as u32);
            }
        }

        let sample = EvalSample {
            id,
            conclusion: ConclusionText {
                dl: render_dl(goal),
                nl: verbalize_axiom(goal, &self.lexicon)?,
            },
            axioms,
            justification_size: gold_justification.len() as u32,
            gold_justification,
            noise,
            removed: BTreeSet::new(),
            atomic_distance: package.conclusion.distance,
            mode,
            ratio,
            seed: sample_seed,
        };
        debug_assert!(sample.validate().is_ok());
        Ok(sample)
    }
}

/// Drops `k` uniformly chosen gold axioms, tagging the sample as a negative
/// logic-completeness instance. The removed axioms disappear from the shown
/// list; their indices stay recorded in `removed`.
pub fn make_incomplete(
    sample: &EvalSample,
    k: u32,
    rng: &mut ChaCha8Rng,
) -> Result<EvalSample, BuildError> {
    let gold: Vec<u32> = sample.gold_justification.iter().copied().collect();
    if k == 0 || k as usize > gold.len() {
        return Err(BuildError::KTooLarge { k, size: gold.len() as u32 });
    }
    let chosen: BTreeSet<u32> = rand::seq::index::sample(rng, gold.len(), k as usize)
        .into_iter()
        .map(|i| gold[i])
        .collect();
    let mut out = sample.clone();
    out.id = format!("{}-k{k}-neg", sample.id);
    out.mode = SampleMode::IncompleteNegative;
    out.axioms.retain(|a| !chosen.contains(&a.idx));
    out.removed = chosen.clone();
    out.gold_justification = sample
        .gold_justification
        .difference(&chosen)
        .copied()
        .collect();
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

/// The positive twin of an incomplete pair: same axioms, nothing removed.
pub fn incomplete_positive_twin(sample: &EvalSample, k: u32) -> EvalSample {
    let mut out = sample.clone();
    out.id = format!("{}-k{k}-pos", sample.id);
    out.mode = SampleMode::IncompletePositive;
    out
}

/// Presentation/mode transforms on an assembled sample.
pub fn apply_mode(sample: &EvalSample, mode: SampleMode) -> EvalSample {
    let mut out = sample.clone();
    match mode {
        SampleMode::JustOnly => {
            out.mode = SampleMode::JustOnly;
            let keep: Vec<&SampleAxiom> = sample
                .axioms
                .iter()
                .filter(|a| sample.gold_justification.contains(&a.idx))
                .collect();
            out.axioms = keep
                .iter()
                .enumerate()
                .map(|(i, a)| SampleAxiom { idx: i as u32, dl: a.dl.clone(), nl: a.nl.clone() })
                .collect();
            out.gold_justification = (0..keep.len() as u32).collect();
            out.noise = BTreeSet::new();
        }
        SampleMode::NaturalLanguage => out.mode = SampleMode::NaturalLanguage,
        SampleMode::Naming => out.mode = SampleMode::Naming,
        other => out.mode = other,
    }
    debug_assert!(out.validate().is_ok());
    out
}

fn ratio_tag(ratio: (u32, u32)) -> String {
    format!("{}to{}", ratio.0, ratio.1)
}

/// A produced sample file: name stem plus its samples.
#[derive(Debug, Clone)]
pub struct SampleGroup {
    pub file_name: String,
    pub mode: SampleMode,
    pub ratio: (u32, u32),
    pub samples: Vec<EvalSample>,
}

#[derive(Debug, Default, Clone)]
pub struct BuildOutput {
    pub groups: Vec<SampleGroup>,
    pub warnings: Vec<String>,
    /// Goals skipped because the guard could not be satisfied, per ratio.
    pub guard_failures: usize,
    pub truncated_enumerations: usize,
}

fn sample_stream(cfg_seed: u64, goal_seq: usize, ratio_idx: usize, salt: u64) -> u64 {
    cfg_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(goal_seq as u64)
        .wrapping_mul(31)
        .wrapping_add(ratio_idx as u64)
        .wrapping_mul(31)
        .wrapping_add(salt)
}

/// Runs the full pipeline for one ontology: select, justify, rank, assemble,
/// derive mode variants. Deterministic in `(ontology, cfg)`.
pub fn build_dataset(
    builder: &DatasetBuilder<'_>,
    taxonomy: &TaxonomyGraph,
    cfg: &BuildConfig,
    stem: &str,
) -> Result<BuildOutput, BuildError> {
    let mut output = BuildOutput::default();

    let standard_like: BTreeSet<BuildMode> = cfg
        .modes
        .iter()
        .copied()
        .filter(|m| *m != BuildMode::Hard)
        .collect();

    let mut packages: Vec<GoalPackage> = Vec::new();
    if !standard_like.is_empty() {
        let selection = select_conclusions(taxonomy, cfg, cfg.seed);
        output.warnings.extend(selection.warnings.iter().cloned());
        let results = crate::exec::map_collect(&selection.goals, |conclusion| {
            builder.package_goal(conclusion, cfg)
        });
        for result in results {
            match result {
                Ok(package) => {
                    if package.truncated {
                        output.truncated_enumerations += 1;
                    }
                    packages.push(package);
                }
                Err(e) => output.warnings.push(format!("goal skipped: {e}")),
            }
        }
    }

    for (ratio_idx, &ratio) in cfg.ratios.iter().enumerate() {
        let mut standard: Vec<EvalSample> = Vec::new();
        for package in &packages {
            let seq = package.conclusion.seq;
            let id = format!(
                "{stem}-{}-d{:02}-g{seq:04}",
                ratio_tag(ratio),
                package.conclusion.distance
            );
            let stream = sample_stream(cfg.seed, seq, ratio_idx, 1);
            match builder.assemble_sample(package, ratio, SampleMode::Standard, id, stream) {
                Ok(sample) => standard.push(sample),
                Err(BuildError::GuardUnsatisfiable { .. }) => output.guard_failures += 1,
                Err(other) => return Err(other),
            }
        }

        for mode in &standard_like {
            match mode {
                BuildMode::Standard => {
                    output.groups.push(SampleGroup {
                        file_name: format!("{stem}.standard.{}.jsonl", ratio_tag(ratio)),
                        mode: SampleMode::Standard,
                        ratio,
                        samples: standard.clone(),
                    });
                }
                BuildMode::NaturalLanguage | BuildMode::JustOnly | BuildMode::Naming => {
                    let sample_mode = match mode {
                        BuildMode::NaturalLanguage => SampleMode::NaturalLanguage,
                        BuildMode::JustOnly => SampleMode::JustOnly,
                        _ => SampleMode::Naming,
                    };
                    let samples: Vec<EvalSample> = standard
                        .iter()
                        .map(|s| {
                            let mut v = apply_mode(s, sample_mode);
                            v.id = format!("{}-{}", s.id, sample_mode);
                            v
                        })
                        .collect();
                    output.groups.push(SampleGroup {
                        file_name: format!("{stem}.{}.{}.jsonl", sample_mode, ratio_tag(ratio)),
                        mode: sample_mode,
                        ratio,
                        samples,
                    });
                }
                BuildMode::Incomplete => {
                    let mut negatives = Vec::new();
                    let mut positives = Vec::new();
                    let (k_lo, k_hi) = cfg.incomplete_k_range;
                    for sample in &standard {
                        if sample.atomic_distance < cfg.incomplete_min_distance {
                            continue;
                        }
                        let max_k = k_hi.min(sample.gold_justification.len() as u32);
                        for k in k_lo..=max_k {
                            let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
                            rng.set_stream(1000 + k as u64);
                            let negative = make_incomplete(sample, k, &mut rng)?;
                            positives.push(incomplete_positive_twin(sample, k));
                            negatives.push(negative);
                        }
                    }
                    output.groups.push(SampleGroup {
                        file_name: format!(
                            "{stem}.incomplete_negative.{}.jsonl",
                            ratio_tag(ratio)
                        ),
                        mode: SampleMode::IncompleteNegative,
                        ratio,
                        samples: negatives,
                    });
                    output.groups.push(SampleGroup {
                        file_name: format!(
                            "{stem}.incomplete_positive.{}.jsonl",
                            ratio_tag(ratio)
                        ),
                        mode: SampleMode::IncompletePositive,
                        ratio,
                        samples: positives,
                    });
                }
                BuildMode::Hard => {}
            }
        }
    }

    if cfg.modes.contains(&BuildMode::Hard) {
        let hard = select_hard_cases(builder, taxonomy, cfg)?;
        for (ratio_idx, &ratio) in cfg.ratios.iter().enumerate() {
            let mut samples = Vec::new();
            for package in &hard {
                let seq = package.conclusion.seq;
                let id = format!(
                    "{stem}-hard-{}-d{:02}-g{seq:04}",
                    ratio_tag(ratio),
                    package.conclusion.distance
                );
                let stream = sample_stream(cfg.seed, seq, ratio_idx, 2);
                match builder.assemble_sample(package, ratio, SampleMode::Hard, id, stream) {
                    Ok(sample) => samples.push(sample),
                    Err(BuildError::GuardUnsatisfiable { .. }) => output.guard_failures += 1,
                    Err(other) => return Err(other),
                }
            }
            output.groups.push(SampleGroup {
                file_name: format!("{stem}.hard.{}.jsonl", ratio_tag(ratio)),
                mode: SampleMode::Hard,
                ratio,
                samples,
            });
        }
    }

    Ok(output)
}

/// Mines hard cases: a wider per-distance pool, kept when the justification
/// size exceeds the atomic distance by at least `hard_min_gap`, capped per
/// `(distance, |J|)` cell.
pub fn select_hard_cases(
    builder: &DatasetBuilder<'_>,
    taxonomy: &TaxonomyGraph,
    cfg: &BuildConfig,
) -> Result<Vec<GoalPackage>, BuildError> {
    let pool_cfg = BuildConfig {
        per_distance_quota: cfg.hard_pool_per_distance,
        ..cfg.clone()
    };
    // Offset the stream so the hard pool is independent of the standard pick.
    let selection = select_conclusions(taxonomy, &pool_cfg, cfg.seed.wrapping_add(0x48415244));
    let results = crate::exec::map_collect(&selection.goals, |conclusion| {
        builder.package_goal(conclusion, cfg)
    });

    let mut cells: BTreeMap<(u32, usize), usize> = BTreeMap::new();
    let mut kept = Vec::new();
    for result in results {
        let package = match result {
            Ok(p) => p,
            Err(_) => continue,
        };
        let jsize = package.justification.axioms.len();
        let distance = package.conclusion.distance;
        if (jsize as u32) < distance + cfg.hard_min_gap {
            continue;
        }
        let cell = cells.entry((distance, jsize)).or_insert(0);
        if *cell >= cfg.hard_cap_per_cell {
            continue;
        }
        *cell += 1;
        kept.push(package);
    }
    Ok(kept)
}
