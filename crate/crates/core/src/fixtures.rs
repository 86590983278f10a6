//! Checked-in sample data: small ontology files and verbatim model-response
//! transcripts used by tests, golden checks and demos.

/// Six-axiom animal ontology (two relevant and one unrelated axiom per source).
pub const FIG1_ANIMALS_DL: &str = include_str!("../fixtures/fig1_animals.dl");

/// Axioms of the worked prompt example.
pub const FIG4_AXIOMS_DL: &str = include_str!("../fixtures/fig4_axioms.dl");
/// The desired response for the worked example (goal `D ⊑ E`).
pub const FIG4_RESPONSE: &str = include_str!("../fixtures/fig4_response.txt");

/// Input of the simple case study (goal `A2 ⊑ A7`).
pub const FIG13_AXIOMS_DL: &str = include_str!("../fixtures/fig13_axioms.dl");
/// Model output for the simple case study; fully correct.
pub const FIG13_RESPONSE: &str = include_str!("../fixtures/fig13_response.txt");

/// Input of the complex case study (goal `A23 ⊑ A20`).
pub const FIG14_AXIOMS_DL: &str = include_str!("../fixtures/fig14_axioms.dl");
/// Model output for the complex case study; STEP 1 omits a needed premise.
pub const FIG14_RESPONSE: &str = include_str!("../fixtures/fig14_response.txt");

/// Input of the hard case study (goal `A37 ⊑ A12`, justification size 15).
pub const FIG15_AXIOMS_DL: &str = include_str!("../fixtures/fig15_axioms.dl");
/// Token-limit-truncated output: reasoning prose without the required sections.
pub const FIG15_RESPONSE: &str = include_str!("../fixtures/fig15_response.txt");
