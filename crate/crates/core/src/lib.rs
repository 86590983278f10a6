//! Construction and grading of EL proof-evaluation benchmarks.
//!
//! The crate covers the full offline pipeline: parsing EL ontologies,
//! consequence-based classification, justification extraction, verbalization,
//! similarity-ranked noise selection, sample assembly, prompt rendering, a
//! chat-completions client, response parsing and reasoner-verified scoring.

pub mod dataset;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod justify;
pub mod model;
pub mod normal;
pub mod oracle;
pub mod proofdsl;
pub mod reasoner;
pub mod runner;
pub mod score;
pub mod similarity;
pub mod synth;
pub mod taxonomy;
pub mod verbalize;

pub use model::{axiom_length, canonicalize, Axiom, Concept, Ontology, Signature};
