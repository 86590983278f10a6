//! Reasoner-verified scoring of parsed responses and batch aggregation.
//!
//! Extraction is graded by Jaccard similarity against the stored gold
//! justification. A simplification entry is correct when the sample's
//! original axiom entails the simplified form. A derivation step is valid
//! when every premise resolves (axiom index, earlier step, or a literally
//! written axiom matching either) and the resolved premises together with the
//! conclusions of previously validated steps entail the stated conclusion;
//! the overall derivation additionally has to end in the target conclusion.
//!
//! Natural-language samples are graded on format and Jaccard only; their
//! logical fields stay unset. Weighted aggregate values multiply each raw
//! mean by the format-correctness rate.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::dl::parse_dl_axiom;
use crate::io::sample::{EvalSample, SampleMode};
use crate::model::{axiom_length, Axiom, Ontology};
use crate::proofdsl::{
    parse_incomplete, parse_proof, parse_proof_surface, ProofScript, Ref,
};
use crate::reasoner::entails;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("empty score batch")]
    EmptyBatch,
}

/// Exact set formula `|S ∩ S_gt| / |S ∪ S_gt|`.
pub fn jaccard(s: &BTreeSet<u32>, gt: &BTreeSet<u32>) -> f64 {
    let union = s.union(gt).count();
    if union == 0 {
        return 1.0;
    }
    s.intersection(gt).count() as f64 / union as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompleteScore {
    pub missing_correct: bool,
    pub useful_jaccard: f64,
    /// True when predicted useful indices pointed outside the shown axioms.
    pub schema_warning: bool,
}

/// Per-sample metric record. Logical fields are `None` when the response
/// failed the format check, and stay `None` for tasks where they cannot be
/// verified (natural-language presentation, incomplete task).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub sample_id: String,
    pub mode: SampleMode,
    pub atomic_distance: u32,
    pub justification_size: u32,
    pub format_ok: bool,
    pub format_error: Option<String>,
    pub jaccard: Option<f64>,
    pub simp_axiom_wise: Option<f64>,
    pub simp_overall: Option<bool>,
    pub length_orig: u32,
    pub length_simp: u32,
    pub deriv_step_wise: Option<f64>,
    pub deriv_overall: Option<bool>,
    pub n_steps: Option<u32>,
    pub incomplete: Option<IncompleteScore>,
    /// Number of removed axioms for incomplete-task samples.
    pub removed_k: Option<u32>,
}

impl SampleScore {
    fn empty(sample: &EvalSample) -> SampleScore {
        SampleScore {
            sample_id: sample.id.clone(),
            mode: sample.mode,
            atomic_distance: sample.atomic_distance,
            justification_size: sample.justification_size,
            format_ok: false,
            format_error: None,
            jaccard: None,
            simp_axiom_wise: None,
            simp_overall: None,
            length_orig: 0,
            length_simp: 0,
            deriv_step_wise: None,
            deriv_overall: None,
            n_steps: None,
            incomplete: None,
            removed_k: sample.mode.is_incomplete().then(|| sample.removed.len() as u32),
        }
    }
}

fn sample_axioms(sample: &EvalSample) -> BTreeMap<u32, Axiom> {
    sample
        .axioms
        .iter()
        .filter_map(|a| parse_dl_axiom(&a.dl).ok().map(|ax| (a.idx, ax)))
        .collect()
}

/// Grades the SIMPLIFY section: per-entry entailment from the true original
/// axiom, conclusion derivability from the simplified forms, and the weighted
/// lengths of original vs simplified axioms.
pub fn score_simplification(
    script: &ProofScript,
    axioms: &BTreeMap<u32, Axiom>,
    target: &Axiom,
) -> (f64, bool, u32, u32) {
    let mut correct = 0usize;
    let mut groups: BTreeMap<u32, Vec<Option<Axiom>>> = BTreeMap::new();
    for entry in &script.simplifications {
        let original = axioms.get(&entry.axiom_id);
        let ok = match (original, &entry.simplified) {
            (Some(orig), Some(simp)) => {
                entails(&Ontology::from_axioms([orig.clone()]), simp)
            }
            _ => false,
        };
        if ok {
            correct += 1;
        }
        groups
            .entry(entry.axiom_id)
            .or_default()
            .push(if original.is_some() { entry.simplified.clone() } else { None });
    }
    let total = script.simplifications.len();
    let axiom_wise = if total == 0 { 1.0 } else { correct as f64 / total as f64 };

    // Derivability base: simplified forms where given, identity for the
    // remaining axioms the response claims to use.
    let mut base: Vec<Axiom> = Vec::new();
    for (&id, forms) in &groups {
        for form in forms.iter().flatten() {
            base.push(form.clone());
        }
        let _ = id;
    }
    for &id in &script.axioms_used {
        if !groups.contains_key(&id) {
            if let Some(orig) = axioms.get(&id) {
                base.push(orig.clone());
            }
        }
    }
    let all_correct = correct == total;
    let overall = all_correct && entails(&Ontology::from_axioms(base), target);

    let mut length_orig = 0u32;
    let mut length_simp = 0u32;
    for (id, forms) in &groups {
        let Some(orig) = axioms.get(id) else { continue };
        if forms.iter().any(Option::is_none) {
            continue; // unparseable form: the pair contributes no lengths
        }
        length_orig += axiom_length(orig);
        length_simp += forms.iter().flatten().map(axiom_length).sum::<u32>();
    }
    (axiom_wise, overall, length_orig, length_simp)
}

/// Grades the DERIVE section. Returns `(step_wise, overall, n_steps)`.
pub fn score_derivation(
    script: &ProofScript,
    axioms: &BTreeMap<u32, Axiom>,
    target: &Axiom,
) -> (f64, bool, u32) {
    let mut valid_flags: Vec<bool> = Vec::with_capacity(script.steps.len());
    let mut valid_conclusions: Vec<Axiom> = Vec::new();

    for (at, step) in script.steps.iter().enumerate() {
        let mut premises: Vec<Axiom> = Vec::new();
        let mut resolved = true;
        for premise in &step.premises {
            let axiom = match premise {
                Ref::Axiom(i) => axioms.get(i).cloned(),
                Ref::Step(label) => script.steps[..at]
                    .iter()
                    .find(|s| s.label == *label)
                    .map(|s| s.conclusion.clone()),
                Ref::Literal(written) => script.steps[..at]
                    .iter()
                    .find(|s| s.conclusion.canonical_eq(written))
                    .map(|s| s.conclusion.clone())
                    .or_else(|| {
                        axioms.values().find(|ax| ax.canonical_eq(written)).cloned()
                    }),
            };
            match axiom {
                Some(ax) => premises.push(ax),
                None => {
                    resolved = false;
                    break;
                }
            }
        }
        let valid = resolved && {
            let mut base = premises;
            base.extend(valid_conclusions.iter().cloned());
            entails(&Ontology::from_axioms(base), &step.conclusion)
        };
        if valid {
            valid_conclusions.push(step.conclusion.clone());
        }
        valid_flags.push(valid);
    }

    let n_steps = script.steps.len() as u32;
    let valid_count = valid_flags.iter().filter(|&&v| v).count();
    let step_wise = if n_steps == 0 { 0.0 } else { valid_count as f64 / n_steps as f64 };
    let reached_target = script
        .steps
        .iter()
        .zip(&valid_flags)
        .any(|(step, &valid)| valid && step.conclusion.canonical_eq(target));
    let overall = n_steps > 0 && valid_count as u32 == n_steps && reached_target;
    (step_wise, overall, n_steps)
}

/// Grades a logic-completeness response against the sample ground truth.
pub fn score_incomplete_response(
    response: &crate::proofdsl::IncompleteResponse,
    sample: &EvalSample,
) -> IncompleteScore {
    let gt_missing = sample.mode == SampleMode::IncompleteNegative;
    let shown = sample.shown_indices();
    let in_range: BTreeSet<u32> =
        response.useful.iter().copied().filter(|i| shown.contains(i)).collect();
    let schema_warning = in_range.len() != response.useful.len();
    IncompleteScore {
        missing_correct: response.missing == gt_missing,
        useful_jaccard: jaccard(&in_range, &sample.gold_justification),
        schema_warning,
    }
}

/// Scores one raw response text against its sample.
pub fn score_sample(sample: &EvalSample, response: &str) -> SampleScore {
    let mut score = SampleScore::empty(sample);
    match sample.mode {
        SampleMode::IncompletePositive | SampleMode::IncompleteNegative => {
            match parse_incomplete(response) {
                Ok(parsed) => {
                    score.format_ok = true;
                    score.incomplete = Some(score_incomplete_response(&parsed, sample));
                }
                Err(e) => score.format_error = Some(e.reason),
            }
        }
        SampleMode::NaturalLanguage => match parse_proof_surface(response) {
            Ok(surface) => {
                score.format_ok = true;
                score.jaccard = Some(jaccard(&surface.axioms_used, &sample.gold_justification));
            }
            Err(e) => score.format_error = Some(e.reason),
        },
        SampleMode::Standard | SampleMode::Hard | SampleMode::JustOnly | SampleMode::Naming => {
            match parse_proof(response) {
                Ok(script) => {
                    let axioms = sample_axioms(sample);
                    let Ok(target) = parse_dl_axiom(&sample.conclusion.dl) else {
                        score.format_error = Some("sample conclusion is not DL".into());
                        return score;
                    };
                    score.format_ok = true;
                    score.jaccard =
                        Some(jaccard(&script.axioms_used, &sample.gold_justification));
                    let (axiom_wise, overall, length_orig, length_simp) =
                        score_simplification(&script, &axioms, &target);
                    score.simp_axiom_wise = Some(axiom_wise);
                    score.simp_overall = Some(overall);
                    score.length_orig = length_orig;
                    score.length_simp = length_simp;
                    let (step_wise, overall, n_steps) =
                        score_derivation(&script, &axioms, &target);
                    score.deriv_step_wise = Some(step_wise);
                    score.deriv_overall = Some(overall);
                    score.n_steps = Some(n_steps);
                }
                Err(e) => score.format_error = Some(e.reason),
            }
        }
    }
    score
}

/// Scores a batch in parallel; responses are matched to samples by id.
pub fn score_batch(
    samples: &[EvalSample],
    responses: &BTreeMap<String, String>,
) -> Vec<SampleScore> {
    crate::exec::map_collect(samples, |sample| {
        match responses.get(&sample.id) {
            Some(response) => score_sample(sample, response),
            None => {
                let mut score = SampleScore::empty(sample);
                score.format_error = Some("no response recorded".into());
                score
            }
        }
    })
}

/// Raw or weighted means of the Table-style metrics (rates in percent).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub jaccard: f64,
    pub simp_axiom_wise: f64,
    pub simp_overall: f64,
    pub length_drop_pct: f64,
    pub deriv_step_wise: f64,
    pub deriv_overall: f64,
    pub avg_steps: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupCell {
    pub atomic_distance: u32,
    pub justification_size: u32,
    pub n: usize,
    pub format_rate_pct: f64,
    pub weighted: MetricMeans,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompleteAggregate {
    pub n: usize,
    /// F1 of recognizing incomplete premise sets (MISSING = YES as the
    /// positive class), over format-correct responses.
    pub f1: f64,
    pub missing_accuracy: f64,
    pub useful_jaccard_mean: f64,
    /// Mean useful-axiom Jaccard per number of removed axioms.
    pub useful_jaccard_by_k: BTreeMap<u32, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub n: usize,
    pub format_rate_pct: f64,
    pub raw: MetricMeans,
    pub weighted: MetricMeans,
    /// Cells keyed by `(atomic_distance, justification_size)`, sorted.
    pub groups: Vec<GroupCell>,
    pub incomplete: Option<IncompleteAggregate>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn rate(values: impl Iterator<Item = bool>) -> f64 {
    mean(values.map(|b| if b { 1.0 } else { 0.0 }))
}

fn raw_means(scores: &[&SampleScore]) -> MetricMeans {
    let ok: Vec<&&SampleScore> = scores.iter().filter(|s| s.format_ok).collect();
    let orig: u64 = ok.iter().map(|s| s.length_orig as u64).sum();
    let simp: u64 = ok.iter().map(|s| s.length_simp as u64).sum();
    // Pooled totals over the batch's simplification entries.
    let length_drop_pct = if orig == 0 {
        0.0
    } else {
        100.0 * (orig.saturating_sub(simp)) as f64 / orig as f64
    };
    MetricMeans {
        jaccard: mean(ok.iter().filter_map(|s| s.jaccard)),
        simp_axiom_wise: mean(ok.iter().filter_map(|s| s.simp_axiom_wise)),
        simp_overall: rate(ok.iter().filter_map(|s| s.simp_overall)),
        length_drop_pct,
        deriv_step_wise: mean(ok.iter().filter_map(|s| s.deriv_step_wise)),
        deriv_overall: rate(ok.iter().filter_map(|s| s.deriv_overall)),
        avg_steps: mean(ok.iter().filter_map(|s| s.n_steps.map(|n| n as f64))),
    }
}

fn scale(means: &MetricMeans, factor: f64) -> MetricMeans {
    MetricMeans {
        jaccard: means.jaccard * factor,
        simp_axiom_wise: means.simp_axiom_wise * factor,
        simp_overall: means.simp_overall * factor,
        length_drop_pct: means.length_drop_pct * factor,
        deriv_step_wise: means.deriv_step_wise * factor,
        deriv_overall: means.deriv_overall * factor,
        avg_steps: means.avg_steps * factor,
    }
}

/// Aggregates per-sample scores: format rate, raw and weighted means, group
/// cells keyed by `(atomic_distance, justification_size)` and, when present,
/// logic-completeness results.
pub fn aggregate(scores: &[SampleScore]) -> Result<AggregateReport, ScoreError> {
    if scores.is_empty() {
        return Err(ScoreError::EmptyBatch);
    }
    let refs: Vec<&SampleScore> = scores.iter().collect();
    let format_rate_pct = 100.0 * rate(refs.iter().map(|s| s.format_ok));
    let raw = raw_means(&refs);
    let weighted = scale(&raw, format_rate_pct / 100.0);

    let mut groups: BTreeMap<(u32, u32), Vec<&SampleScore>> = BTreeMap::new();
    for score in &refs {
        groups
            .entry((score.atomic_distance, score.justification_size))
            .or_default()
            .push(score);
    }
    let groups = groups
        .into_iter()
        .map(|((distance, jsize), members)| {
            let group_rate = 100.0 * rate(members.iter().map(|s| s.format_ok));
            GroupCell {
                atomic_distance: distance,
                justification_size: jsize,
                n: members.len(),
                format_rate_pct: group_rate,
                weighted: scale(&raw_means(&members), group_rate / 100.0),
            }
        })
        .collect();

    let incompletes: Vec<&SampleScore> =
        refs.iter().copied().filter(|s| s.mode.is_incomplete()).collect();
    let incomplete = if incompletes.is_empty() {
        None
    } else {
        let graded: Vec<(&SampleScore, &IncompleteScore)> = incompletes
            .iter()
            .filter_map(|s| s.incomplete.as_ref().map(|i| (*s, i)))
            .collect();
        let mut tp = 0f64;
        let mut fp = 0f64;
        let mut fn_ = 0f64;
        for (score, inc) in &graded {
            let gt_missing = score.mode == SampleMode::IncompleteNegative;
            let predicted_missing = inc.missing_correct == gt_missing;
            match (gt_missing, predicted_missing) {
                (true, true) => tp += 1.0,
                (false, true) => fp += 1.0,
                (true, false) => fn_ += 1.0,
                (false, false) => {}
            }
        }
        let f1 = if 2.0 * tp + fp + fn_ == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
        let negatives: Vec<&(&SampleScore, &IncompleteScore)> = graded
            .iter()
            .filter(|(s, _)| s.mode == SampleMode::IncompleteNegative)
            .collect();
        let mut by_k: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for (score, inc) in &negatives {
            by_k.entry(score.removed_k.unwrap_or(0)).or_default().push(inc.useful_jaccard);
        }
        Some(IncompleteAggregate {
            n: incompletes.len(),
            f1,
            missing_accuracy: rate(graded.iter().map(|(_, i)| i.missing_correct)),
            useful_jaccard_mean: mean(negatives.iter().map(|(_, i)| i.useful_jaccard)),
            useful_jaccard_by_k: by_k
                .into_iter()
                .map(|(k, vs)| (k, mean(vs.into_iter())))
                .collect(),
        })
    };

    Ok(AggregateReport { n: scores.len(), format_rate_pct, raw, weighted, groups, incomplete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::sample::{ConclusionText, SampleAxiom};

    fn chain_sample() -> EvalSample {
        EvalSample {
            id: "s0".into(),
            conclusion: ConclusionText { dl: "A SubClassOf C".into(), nl: String::new() },
            axioms: vec![
                SampleAxiom { idx: 0, dl: "A SubClassOf B".into(), nl: String::new() },
                SampleAxiom { idx: 1, dl: "B SubClassOf C".into(), nl: String::new() },
                SampleAxiom { idx: 2, dl: "X SubClassOf Y".into(), nl: String::new() },
                SampleAxiom { idx: 3, dl: "Y SubClassOf Z".into(), nl: String::new() },
            ],
            gold_justification: [0, 1].into(),
            noise: [2, 3].into(),
            removed: BTreeSet::new(),
            atomic_distance: 2,
            justification_size: 2,
            mode: SampleMode::Standard,
            ratio: (1, 1),
            seed: 0,
        }
    }

    #[test]
    fn jaccard_examples() {
        let a: BTreeSet<u32> = [1, 2].into();
        let b: BTreeSet<u32> = [1, 2, 3].into();
        assert_eq!(jaccard(&a, &a), 1.0);
        assert!((jaccard(&a, &b) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_single_step_proof_scores_one() {
        let sample = chain_sample();
        let response =
            "AXIOMS_USED: 0,1\nSIMPLIFY:\n[0] A ⊑ B → A ⊑ B\n[1] B ⊑ C → B ⊑ C\nDERIVE:\nSTEP1: [0,1] ⊢ A ⊑ C\n";
        let score = score_sample(&sample, response);
        assert!(score.format_ok);
        assert_eq!(score.jaccard, Some(1.0));
        assert_eq!(score.simp_axiom_wise, Some(1.0));
        assert_eq!(score.simp_overall, Some(true));
        assert_eq!(score.deriv_step_wise, Some(1.0));
        assert_eq!(score.deriv_overall, Some(true));
        assert_eq!(score.n_steps, Some(1));
    }

    #[test]
    fn single_step_restating_an_axiom_is_valid() {
        let mut sample = chain_sample();
        sample.conclusion.dl = "A SubClassOf B".into();
        sample.gold_justification = [0].into();
        sample.noise = [1, 2, 3].into();
        sample.justification_size = 1;
        let response = "AXIOMS_USED: 0\nSIMPLIFY:\nDERIVE:\nSTEP1: [0] ⊢ A ⊑ B\n";
        let score = score_sample(&sample, response);
        assert_eq!(score.deriv_overall, Some(true));
    }

    #[test]
    fn converse_simplification_is_incorrect() {
        let sample = chain_sample();
        let response =
            "AXIOMS_USED: 0,1\nSIMPLIFY:\n[0] A ⊑ B → B ⊑ A\nDERIVE:\nSTEP1: [0,1] ⊢ A ⊑ C\n";
        let score = score_sample(&sample, response);
        assert_eq!(score.simp_axiom_wise, Some(0.0));
        assert_eq!(score.simp_overall, Some(false));
        // Derivation still uses the given axioms, not the simplified forms.
        assert_eq!(score.deriv_overall, Some(true));
    }

    #[test]
    fn equivalence_direction_is_entailed() {
        // {A ≡ C} ⊨ C ⊑ A
        let mut sample = chain_sample();
        sample.axioms[0].dl = "A EquivalentTo C".into();
        let response =
            "AXIOMS_USED: 0,1\nSIMPLIFY:\n[0] A ≡ C → C ⊑ A\nDERIVE:\nSTEP1: [0] ⊢ C ⊑ A\n";
        let score = score_sample(&sample, response);
        assert_eq!(score.simp_axiom_wise, Some(1.0));
    }

    #[test]
    fn unresolved_premise_invalidates_the_step() {
        let sample = chain_sample();
        let response = "AXIOMS_USED: 0,1\nSIMPLIFY:\nDERIVE:\nSTEP1: [7] ⊢ A ⊑ C\n";
        let score = score_sample(&sample, response);
        assert_eq!(score.deriv_step_wise, Some(0.0));
        assert_eq!(score.deriv_overall, Some(false));
    }

    #[test]
    fn literal_premises_resolve_to_steps_then_axioms() {
        let sample = chain_sample();
        let response = "AXIOMS_USED: 0,1\nSIMPLIFY:\nDERIVE:\nSTEP1: [0,1] ⊢ A ⊑ C\nSTEP2: [A ⊑ C] ⊢ A ⊑ C\nSTEP3: [A ⊑ B, 1] ⊢ A ⊑ C\n";
        let score = score_sample(&sample, response);
        assert_eq!(score.deriv_step_wise, Some(1.0));
    }

    #[test]
    fn format_failure_zeroes_everything() {
        let sample = chain_sample();
        let score = score_sample(&sample, "I cannot answer that.");
        assert!(!score.format_ok);
        assert!(score.jaccard.is_none());
        assert!(score.n_steps.is_none());
    }

    #[test]
    fn natural_language_mode_scores_format_and_jaccard_only() {
        let mut sample = chain_sample();
        sample.mode = SampleMode::NaturalLanguage;
        let response =
            "AXIOMS_USED: 0,1\nSIMPLIFY:\n[0] a is a subclass of b → keep it\nDERIVE:\nSTEP1: [0] ⊢ a is c\n";
        let score = score_sample(&sample, response);
        assert!(score.format_ok);
        assert_eq!(score.jaccard, Some(1.0));
        assert!(score.simp_axiom_wise.is_none());
        assert!(score.deriv_step_wise.is_none());
    }

    #[test]
    fn incomplete_scoring_matches_ground_truth() {
        let mut sample = chain_sample();
        sample.mode = SampleMode::IncompleteNegative;
        sample.axioms.remove(0);
        sample.removed = [0].into();
        sample.gold_justification = [1].into();

        let response = "MISSING: YES\nAXIOMS_USEFUL: [1]\nSUSPECTED_MISSING_PARTS: the a-b link\n";
        let score = score_sample(&sample, response);
        let inc = score.incomplete.unwrap();
        assert!(inc.missing_correct);
        assert_eq!(inc.useful_jaccard, 1.0);
        assert!(!inc.schema_warning);

        // Predicting a removed index is excluded and flagged.
        let response = "MISSING: YES\nAXIOMS_USEFUL: [0, 1]\nSUSPECTED_MISSING_PARTS: NONE\n";
        let score = score_sample(&sample, response);
        let inc = score.incomplete.unwrap();
        assert!(inc.schema_warning);
        assert_eq!(inc.useful_jaccard, 1.0);
    }

    #[test]
    fn weighted_equals_raw_times_rate() {
        let sample = chain_sample();
        let good = "AXIOMS_USED: 0,1\nSIMPLIFY:\nDERIVE:\nSTEP1: [0,1] ⊢ A ⊑ C\n";
        let mut scores = Vec::new();
        for i in 0..10 {
            let mut s = sample.clone();
            s.id = format!("s{i}");
            scores.push(score_sample(&s, if i < 5 { good } else { "broken" }));
        }
        let report = aggregate(&scores).unwrap();
        assert!((report.format_rate_pct - 50.0).abs() < 1e-12);
        assert!((report.raw.jaccard - 1.0).abs() < 1e-12);
        assert!((report.weighted.jaccard - 0.5).abs() < 1e-12);
        assert!(
            (report.weighted.deriv_overall
                - report.raw.deriv_overall * report.format_rate_pct / 100.0)
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn all_format_failures_zero_the_weighted_metrics() {
        let sample = chain_sample();
        let scores = vec![score_sample(&sample, "x"), score_sample(&sample, "y")];
        let report = aggregate(&scores).unwrap();
        assert_eq!(report.format_rate_pct, 0.0);
        assert_eq!(report.weighted.jaccard, 0.0);
        assert_eq!(report.weighted.deriv_overall, 0.0);
    }

    #[test]
    fn empty_batch_is_an_error() {
        assert!(matches!(aggregate(&[]), Err(ScoreError::EmptyBatch)));
    }

    #[test]
    fn perfect_balanced_incomplete_set_has_f1_one() {
        let mut scores = Vec::new();
        for i in 0..4 {
            let mut sample = chain_sample();
            sample.id = format!("i{i}");
            let negative = i % 2 == 0;
            if negative {
                sample.mode = SampleMode::IncompleteNegative;
                sample.axioms.remove(0);
                sample.removed = [0].into();
                sample.gold_justification = [1].into();
            } else {
                sample.mode = SampleMode::IncompletePositive;
            }
            let response = if negative {
                "MISSING: YES\nAXIOMS_USEFUL: [1]\nSUSPECTED_MISSING_PARTS: missing link\n"
            } else {
                "MISSING: NO\nAXIOMS_USEFUL: [0, 1]\nSUSPECTED_MISSING_PARTS: NONE\n"
            };
            scores.push(score_sample(&sample, response));
        }
        let report = aggregate(&scores).unwrap();
        let inc = report.incomplete.unwrap();
        assert_eq!(inc.f1, 1.0);
        assert_eq!(inc.missing_accuracy, 1.0);
    }
}
