//! Ontology and sample serialization: the compact DL text format, an OWL
//! functional-syntax subset, and the JSONL benchmark sample schema.

pub mod dl;
pub mod ofs;
pub mod sample;

pub use dl::{parse_dl_axiom, parse_dl_document, render_dl, DlParseError};
pub use ofs::{parse_ofs, OfsError};
pub use sample::{read_sample, read_samples, write_sample, write_samples, SchemaError};

/// Outcome of ingesting an ontology document. Skipped declarations are never
/// fatal; they are reported here instead.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub accepted: usize,
    /// `(locator, reason)` pairs, e.g. `("line 12", "non-EL: ObjectComplementOf")`.
    pub skipped: Vec<(String, String)>,
    /// How many of the skipped declarations were rejected for non-EL constructors.
    pub non_el_filtered: usize,
}

impl ParseReport {
    pub fn total(&self) -> usize {
        self.accepted + self.skipped.len()
    }

    pub(crate) fn skip(&mut self, locator: impl Into<String>, reason: impl Into<String>) {
        let reason = reason.into();
        if reason.starts_with("non-EL") {
            self.non_el_filtered += 1;
        }
        self.skipped.push((locator.into(), reason));
    }
}
