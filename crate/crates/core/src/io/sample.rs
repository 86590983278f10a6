//! The benchmark sample schema: one JSON object per line, UTF-8, snake_case
//! keys, axiom indices base 0. Serialization is stable: re-serializing a
//! sample yields byte-identical output.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("schema error in field '{field}': {reason}")]
pub struct SchemaError {
    pub field: String,
    pub reason: String,
}

fn schema_err(field: &str, reason: impl Into<String>) -> SchemaError {
    SchemaError { field: field.into(), reason: reason.into() }
}

/// Presentation/task variant of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Standard,
    Hard,
    NaturalLanguage,
    IncompletePositive,
    IncompleteNegative,
    JustOnly,
    Naming,
}

impl SampleMode {
    pub fn is_incomplete(self) -> bool {
        matches!(self, SampleMode::IncompletePositive | SampleMode::IncompleteNegative)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SampleMode::Standard => "standard",
            SampleMode::Hard => "hard",
            SampleMode::NaturalLanguage => "natural_language",
            SampleMode::IncompletePositive => "incomplete_positive",
            SampleMode::IncompleteNegative => "incomplete_negative",
            SampleMode::JustOnly => "just_only",
            SampleMode::Naming => "naming",
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConclusionText {
    pub dl: String,
    pub nl: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleAxiom {
    pub idx: u32,
    pub dl: String,
    pub nl: String,
}

/// One benchmark item: a conclusion, the shuffled axiom list shown to the
/// model, the gold justification and bookkeeping metadata.
///
/// Indices in `removed` refer to axioms deleted from the shown list
/// (incomplete mode); `gold_justification` holds only the remaining ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSample {
    pub id: String,
    pub conclusion: ConclusionText,
    pub axioms: Vec<SampleAxiom>,
    pub gold_justification: BTreeSet<u32>,
    pub noise: BTreeSet<u32>,
    pub removed: BTreeSet<u32>,
    pub atomic_distance: u32,
    pub justification_size: u32,
    pub mode: SampleMode,
    pub ratio: (u32, u32),
    pub seed: u64,
}

impl EvalSample {
    pub fn shown_indices(&self) -> BTreeSet<u32> {
        self.axioms.iter().map(|a| a.idx).collect()
    }

    pub fn axiom_by_idx(&self, idx: u32) -> Option<&SampleAxiom> {
        self.axioms.iter().find(|a| a.idx == idx)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let shown = self.shown_indices();
        if shown.len() != self.axioms.len() {
            return Err(schema_err("axioms", "duplicate axiom indices"));
        }
        if !self.gold_justification.is_disjoint(&self.noise) {
            return Err(schema_err("gold_justification", "overlaps with noise"));
        }
        if !shown.is_disjoint(&self.removed) {
            return Err(schema_err("removed", "removed axiom still present in axiom list"));
        }
        let mut covered: BTreeSet<u32> = self.gold_justification.clone();
        covered.extend(&self.noise);
        covered.extend(&self.removed);
        let mut expected = shown.clone();
        expected.extend(&self.removed);
        if covered != expected {
            return Err(schema_err(
                "gold_justification",
                "gold ∪ noise ∪ removed must cover exactly the axiom indices",
            ));
        }
        let jsize = self.gold_justification.len() + self.removed.len();
        if jsize as u32 != self.justification_size {
            return Err(schema_err(
                "justification_size",
                format!("expected {jsize}, found {}", self.justification_size),
            ));
        }
        if !self.mode.is_incomplete() && !self.removed.is_empty() {
            return Err(schema_err("removed", "non-empty outside incomplete mode"));
        }
        Ok(())
    }
}

/// Serializes one sample as a single JSON line.
pub fn write_sample(sample: &EvalSample) -> String {
    serde_json::to_string(sample).expect("sample serialization is infallible")
}

/// Parses and validates one JSON line.
pub fn read_sample(text: &str) -> Result<EvalSample, SchemaError> {
    let sample: EvalSample =
        serde_json::from_str(text).map_err(|e| schema_err("<json>", e.to_string()))?;
    sample.validate()?;
    Ok(sample)
}

pub fn write_samples(samples: &[EvalSample]) -> String {
    let mut out = String::new();
    for sample in samples {
        out.push_str(&write_sample(sample));
        out.push('\n');
    }
    out
}

pub fn read_samples(text: &str) -> Result<Vec<EvalSample>, SchemaError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(read_sample)
        .collect()
}
