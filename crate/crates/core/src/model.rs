//! Abstract syntax for the EL concept language and its axioms.
//!
//! Concepts are built from `⊤`, atomic names, conjunction and existential
//! restriction. Axioms are subclass inclusions and equivalences between
//! (possibly complex) concepts. All public constructors keep values in
//! canonical form: conjunctions are flattened, sorted, duplicate-free and
//! never contain redundant `⊤` members.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Reserved prefix for machine-generated names. Names with this prefix are
/// rejected by the parsers and filtered from user-facing output.
pub const FRESH_PREFIX: &str = "__";

/// Display name of the top concept.
pub const TOP_NAME: &str = "⊤";

/// Returns true for machine-generated (normalization or query) names.
pub fn is_fresh_name(name: &str) -> bool {
    name.starts_with(FRESH_PREFIX)
}

/// An EL concept.
///
/// The derived `Ord` realizes the structural order used when sorting
/// conjuncts: `Top < Atom < Exists < And`, with lexicographic comparison of
/// names and sub-concepts inside each variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Atom(String),
    /// Existential restriction `∃role.filler`.
    Exists(String, Box<Concept>),
    /// Conjunction with at least two members once canonicalized.
    And(Vec<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "atom names must be non-empty");
        Concept::Atom(name)
    }

    pub fn exists(role: impl Into<String>, filler: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(filler))
    }

    /// Builds a conjunction and immediately canonicalizes it.
    pub fn and(conjuncts: Vec<Concept>) -> Self {
        canonicalize(Concept::And(conjuncts))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Concept::Atom(_) | Concept::Top)
    }

    /// The atomic name, if this concept is an atom (`⊤` maps to [`TOP_NAME`]).
    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Concept::Atom(name) => Some(name),
            Concept::Top => Some(TOP_NAME),
            _ => None,
        }
    }

    /// Weighted length: 1 per concept-name occurrence (including `⊤`), per
    /// role, per `⊓` and per `∃`.
    pub fn length(&self) -> u32 {
        match self {
            Concept::Top | Concept::Atom(_) => 1,
            Concept::Exists(_, filler) => 2 + filler.length(),
            Concept::And(cs) => {
                let members: u32 = cs.iter().map(Concept::length).sum();
                members + (cs.len() as u32 - 1)
            }
        }
    }

    pub fn signature_into(&self, concepts: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
        match self {
            Concept::Top => {}
            Concept::Atom(name) => {
                concepts.insert(name.clone());
            }
            Concept::Exists(role, filler) => {
                roles.insert(role.clone());
                filler.signature_into(concepts, roles);
            }
            Concept::And(cs) => {
                for c in cs {
                    c.signature_into(concepts, roles);
                }
            }
        }
    }
}

/// Flattens nested conjunctions, drops redundant `⊤` members, sorts and
/// deduplicates. Idempotent and logically equivalent to its input.
pub fn canonicalize(concept: Concept) -> Concept {
    match concept {
        Concept::Top => Concept::Top,
        Concept::Atom(name) => Concept::Atom(name),
        Concept::Exists(role, filler) => Concept::Exists(role, Box::new(canonicalize(*filler))),
        Concept::And(cs) => {
            let mut members = BTreeSet::new();
            for c in cs {
                match canonicalize(c) {
                    Concept::Top => {}
                    Concept::And(inner) => members.extend(inner),
                    other => {
                        members.insert(other);
                    }
                }
            }
            match members.len() {
                0 => Concept::Top,
                1 => members.into_iter().next().unwrap(),
                _ => Concept::And(members.into_iter().collect()),
            }
        }
    }
}

/// A terminological axiom over EL concepts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SubClassOf(Concept, Concept),
    EquivalentClasses(Concept, Concept),
}

impl Axiom {
    pub fn sub_class_of(sub: Concept, sup: Concept) -> Self {
        Axiom::SubClassOf(canonicalize(sub), canonicalize(sup))
    }

    pub fn equivalent(left: Concept, right: Concept) -> Self {
        Axiom::EquivalentClasses(canonicalize(left), canonicalize(right))
    }

    pub fn canonicalized(&self) -> Axiom {
        match self {
            Axiom::SubClassOf(sub, sup) => Axiom::sub_class_of(sub.clone(), sup.clone()),
            Axiom::EquivalentClasses(l, r) => Axiom::equivalent(l.clone(), r.clone()),
        }
    }

    /// Structural equality modulo canonicalization; equivalences also match
    /// with their sides swapped.
    pub fn canonical_eq(&self, other: &Axiom) -> bool {
        match (self.canonicalized(), other.canonicalized()) {
            (Axiom::SubClassOf(a, b), Axiom::SubClassOf(c, d)) => a == c && b == d,
            (Axiom::EquivalentClasses(a, b), Axiom::EquivalentClasses(c, d)) => {
                (a == c && b == d) || (a == d && b == c)
            }
            _ => false,
        }
    }

    pub fn signature_into(&self, concepts: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
        let (l, r) = self.sides();
        l.signature_into(concepts, roles);
        r.signature_into(concepts, roles);
    }

    pub fn sides(&self) -> (&Concept, &Concept) {
        match self {
            Axiom::SubClassOf(l, r) | Axiom::EquivalentClasses(l, r) => (l, r),
        }
    }
}

/// Weighted axiom length: concept names, roles, `⊓`, `∃` and `⊑` weigh 1,
/// `≡` weighs 2. `⊤` counts as a concept.
pub fn axiom_length(axiom: &Axiom) -> u32 {
    match axiom {
        Axiom::SubClassOf(l, r) => l.length() + 1 + r.length(),
        Axiom::EquivalentClasses(l, r) => l.length() + 2 + r.length(),
    }
}

/// Concept and role names occurring in an ontology.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
}

impl Signature {
    pub fn of_axiom(axiom: &Axiom) -> Signature {
        let mut sig = Signature::default();
        axiom.signature_into(&mut sig.concepts, &mut sig.roles);
        sig
    }

    pub fn extend_with(&mut self, axiom: &Axiom) {
        axiom.signature_into(&mut self.concepts, &mut self.roles);
    }
}

/// One axiom stored in an ontology, with an optional provenance label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyEntry {
    pub axiom: Axiom,
    pub source_label: Option<String>,
}

/// An indexed set of axioms. Indices are dense from zero and stable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    entries: Vec<OntologyEntry>,
    signature: Signature,
}

impl Ontology {
    pub fn new() -> Self {
        Ontology::default()
    }

    pub fn from_axioms(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        let mut onto = Ontology::new();
        for axiom in axioms {
            onto.push(axiom, None);
        }
        onto
    }

    /// Appends an axiom and returns its index.
    pub fn push(&mut self, axiom: Axiom, source_label: Option<String>) -> usize {
        let axiom = axiom.canonicalized();
        self.signature.extend_with(&axiom);
        self.entries.push(OntologyEntry { axiom, source_label });
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn axiom(&self, index: usize) -> &Axiom {
        &self.entries[index].axiom
    }

    pub fn entry(&self, index: usize) -> &OntologyEntry {
        &self.entries[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Axiom)> {
        self.entries.iter().enumerate().map(|(i, e)| (i, &e.axiom))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => write!(f, "⊤"),
            Concept::Atom(name) => write!(f, "{name}"),
            Concept::Exists(role, filler) => match filler.as_ref() {
                Concept::And(_) => write!(f, "∃{role}.({filler})"),
                _ => write!(f, "∃{role}.{filler}"),
            },
            Concept::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ⊓ ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf(l, r) => write!(f, "{l} ⊑ {r}"),
            Axiom::EquivalentClasses(l, r) => write!(f, "{l} ≡ {r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> Concept {
        Concept::atom(name)
    }

    #[test]
    fn canonicalize_flattens_sorts_dedupes() {
        let c = Concept::And(vec![a("B"), Concept::And(vec![a("A"), a("A")])]);
        assert_eq!(canonicalize(c), Concept::And(vec![a("A"), a("B")]));
    }

    #[test]
    fn canonicalize_atom_is_identity() {
        assert_eq!(canonicalize(a("A")), a("A"));
    }

    #[test]
    fn canonicalize_recurses_into_fillers() {
        let c = Concept::exists("r", Concept::And(vec![a("B"), a("A")]));
        assert_eq!(
            canonicalize(c),
            Concept::exists("r", Concept::And(vec![a("A"), a("B")]))
        );
    }

    #[test]
    fn canonicalize_drops_top_and_collapses_singletons() {
        assert_eq!(canonicalize(Concept::And(vec![a("A"), Concept::Top])), a("A"));
        assert_eq!(canonicalize(Concept::And(vec![Concept::Top])), Concept::Top);
    }

    #[test]
    fn structural_order_ranks_variants() {
        let mut v = vec![
            Concept::And(vec![a("A"), a("B")]),
            Concept::exists("r", a("A")),
            a("Z"),
            Concept::Top,
        ];
        v.sort();
        assert!(matches!(v[0], Concept::Top));
        assert!(matches!(v[1], Concept::Atom(_)));
        assert!(matches!(v[2], Concept::Exists(..)));
        assert!(matches!(v[3], Concept::And(_)));
    }

    #[test]
    fn axiom_length_examples() {
        // A ⊑ B
        assert_eq!(axiom_length(&Axiom::sub_class_of(a("A"), a("B"))), 3);
        // A ≡ ∃r.B
        assert_eq!(
            axiom_length(&Axiom::equivalent(a("A"), Concept::exists("r", a("B")))),
            6
        );
        // A11 ⊑ A12 ⊓ A13 ⊓ A9 ⊓ A14 ⊓ A15
        let rhs = Concept::and(vec![a("A12"), a("A13"), a("A9"), a("A14"), a("A15")]);
        assert_eq!(axiom_length(&Axiom::sub_class_of(a("A11"), rhs)), 11);
    }

    #[test]
    fn top_counts_as_concept() {
        assert_eq!(axiom_length(&Axiom::sub_class_of(a("A"), Concept::Top)), 3);
    }

    #[test]
    fn canonical_eq_swaps_equivalence_sides() {
        let ax1 = Axiom::equivalent(a("A"), a("B"));
        let ax2 = Axiom::equivalent(a("B"), a("A"));
        assert!(ax1.canonical_eq(&ax2));
        assert!(!ax1.canonical_eq(&Axiom::sub_class_of(a("A"), a("B"))));
    }

    #[test]
    fn ontology_indices_are_dense_and_signature_tracks() {
        let mut onto = Ontology::new();
        let i0 = onto.push(Axiom::sub_class_of(a("A"), a("B")), None);
        let i1 = onto.push(
            Axiom::sub_class_of(a("B"), Concept::exists("r", a("C"))),
            Some("src".into()),
        );
        assert_eq!((i0, i1), (0, 1));
        assert_eq!(onto.len(), 2);
        assert!(onto.signature().concepts.contains("C"));
        assert!(onto.signature().roles.contains("r"));
    }
}
