//! Compositional natural-language rendering of concepts, axioms and query
//! sentences. The rules are deliberately mechanical:
//!
//! * `V(C ⊓ D)` = `"V(C) and V(D)"`
//! * `V(∃r.C)`  = `"something that V(r) some V(C)"`
//!
//! Axioms become `"V(C) is a subclass of V(D)."` / `"V(C) is equivalent to
//! V(D)."`, conclusions become `"Why is V(C) a subclass of V(D)?"`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Axiom, Concept};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerbalizeError {
    #[error("no label for name: {0}")]
    UnknownName(String),
    #[error("query template covers subclass goals only")]
    UnsupportedGoal,
}

/// Maps identifiers to human labels. Without an explicit entry the fallback
/// rule splits camelCase/snake_case and lowercases.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    labels: BTreeMap<String, String>,
    strict: bool,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// A lexicon that errors on unlabeled names instead of falling back.
    pub fn strict(labels: BTreeMap<String, String>) -> Self {
        Lexicon { labels, strict: true }
    }

    pub fn insert(&mut self, name: impl Into<String>, label: impl Into<String>) {
        self.labels.insert(name.into(), label.into());
    }

    pub fn label(&self, name: &str) -> Result<String, VerbalizeError> {
        if let Some(label) = self.labels.get(name) {
            return Ok(label.clone());
        }
        if self.strict {
            return Err(VerbalizeError::UnknownName(name.to_string()));
        }
        let label = fallback_label(name);
        if label.is_empty() {
            return Err(VerbalizeError::UnknownName(name.to_string()));
        }
        Ok(label)
    }
}

/// Derives a label from an identifier: drops any CURIE prefix, splits on
/// underscores, dashes, dots and camelCase boundaries, lowercases.
pub fn fallback_label(name: &str) -> String {
    let local = name.rsplit(':').next().unwrap_or(name);
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = local.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if matches!(c, '_' | '-' | '.' | ' ') {
            if !current.is_empty() {
                words.push(current.clone());
                current.clear();
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_numeric() || (prev.is_uppercase() && next_lower) {
                words.push(current.clone());
                current.clear();
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
        .iter()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Mechanical application of the two composition rules; `⊤` renders "thing".
pub fn verbalize_concept(concept: &Concept, lexicon: &Lexicon) -> Result<String, VerbalizeError> {
    match concept {
        Concept::Top => Ok("thing".to_string()),
        Concept::Atom(name) => lexicon.label(name),
        Concept::Exists(role, filler) => Ok(format!(
            "something that {} some {}",
            lexicon.label(role)?,
            verbalize_concept(filler, lexicon)?
        )),
        Concept::And(members) => {
            let parts = members
                .iter()
                .map(|m| verbalize_concept(m, lexicon))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(parts.join(" and "))
        }
    }
}

pub fn verbalize_axiom(axiom: &Axiom, lexicon: &Lexicon) -> Result<String, VerbalizeError> {
    let (l, r) = axiom.sides();
    let connective = match axiom {
        Axiom::SubClassOf(..) => "is a subclass of",
        Axiom::EquivalentClasses(..) => "is equivalent to",
    };
    Ok(format!(
        "{} {connective} {}.",
        verbalize_concept(l, lexicon)?,
        verbalize_concept(r, lexicon)?
    ))
}

/// Query sentence for a subclass goal.
pub fn verbalize_query(goal: &Axiom, lexicon: &Lexicon) -> Result<String, VerbalizeError> {
    match goal {
        Axiom::SubClassOf(l, r) => Ok(format!(
            "Why is {} a subclass of {}?",
            verbalize_concept(l, lexicon)?,
            verbalize_concept(r, lexicon)?
        )),
        Axiom::EquivalentClasses(..) => Err(VerbalizeError::UnsupportedGoal),
    }
}
