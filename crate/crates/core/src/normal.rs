//! Translation of EL axioms into the four reasoner normal forms.
//!
//! The translation is a conservative extension: entailments over the original
//! signature are preserved. Complex sub-concepts are abbreviated by fresh
//! names carrying the [`FRESH_PREFIX`](crate::model::FRESH_PREFIX), defined in
//! both directions so that a single pass works for either polarity.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::model::{canonicalize, Axiom, Concept, Ontology, TOP_NAME};

/// A normalized axiom. All operands are atomic names; `⊤` appears under its
/// display name [`TOP_NAME`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalizedAxiom {
    /// `A ⊑ B`
    Nf1 { sub: String, sup: String },
    /// `A1 ⊓ A2 ⊑ B`
    Nf2 { lhs: [String; 2], sup: String },
    /// `A ⊑ ∃r.B`
    Nf3 { sub: String, role: String, filler: String },
    /// `∃r.A ⊑ B`
    Nf4 { role: String, filler: String, sup: String },
}

/// Maps each fresh name to the complex concept it abbreviates.
pub type FreshNameMap = BTreeMap<String, Concept>;

/// Rewrites axioms into normal form, generating fresh names on demand.
pub struct Normalizer {
    prefix: String,
    counter: usize,
    cache: HashMap<Concept, String>,
    map: FreshNameMap,
    out: Vec<NormalizedAxiom>,
    queue: VecDeque<(Concept, Concept)>,
}

impl Normalizer {
    /// `prefix` must start with the reserved fresh prefix so generated names
    /// never collide with user signatures.
    pub fn new(prefix: impl Into<String>) -> Self {
        let prefix = prefix.into();
        debug_assert!(crate::model::is_fresh_name(&prefix));
        Normalizer {
            prefix,
            counter: 0,
            cache: HashMap::new(),
            map: FreshNameMap::new(),
            out: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    pub fn add_axiom(&mut self, axiom: &Axiom) {
        match axiom.canonicalized() {
            Axiom::SubClassOf(l, r) => self.queue.push_back((l, r)),
            Axiom::EquivalentClasses(l, r) => {
                self.queue.push_back((l.clone(), r.clone()));
                self.queue.push_back((r, l));
            }
        }
        self.drain();
    }

    pub fn finish(self) -> (Vec<NormalizedAxiom>, FreshNameMap) {
        (self.out, self.map)
    }

    /// Fresh definitional name for a complex concept, introduced with both
    /// inclusion directions so it is usable on either side of a GCI.
    fn define(&mut self, concept: &Concept) -> String {
        if let Some(name) = self.cache.get(concept) {
            return name.clone();
        }
        let name = format!("{}{}", self.prefix, self.counter);
        self.counter += 1;
        self.cache.insert(concept.clone(), name.clone());
        self.map.insert(name.clone(), concept.clone());
        self.queue.push_back((Concept::Atom(name.clone()), concept.clone()));
        self.queue.push_back((concept.clone(), Concept::Atom(name.clone())));
        name
    }

    fn atomize(&mut self, concept: &Concept) -> String {
        match concept {
            Concept::Top => TOP_NAME.to_string(),
            Concept::Atom(name) => name.clone(),
            complex => self.define(complex),
        }
    }

    fn drain(&mut self) {
        while let Some((sub, sup)) = self.queue.pop_front() {
            self.gci(sub, sup);
        }
    }

    fn gci(&mut self, sub: Concept, sup: Concept) {
        // Split conjunctions on the right; drop ⊤ and reflexive tautologies.
        match &sup {
            Concept::Top => return,
            Concept::And(members) => {
                for member in members.clone() {
                    self.queue.push_back((sub.clone(), member));
                }
                return;
            }
            _ => {}
        }
        if sub == sup {
            return;
        }
        match (&sub, &sup) {
            (_, Concept::Exists(role, filler)) => {
                let filler_name = self.atomize(filler);
                match &sub {
                    Concept::Top | Concept::Atom(_) => {
                        let sub_name = self.atomize(&sub);
                        self.out.push(NormalizedAxiom::Nf3 {
                            sub: sub_name,
                            role: role.clone(),
                            filler: filler_name,
                        });
                    }
                    complex => {
                        // Complex ⊑ ∃r.B goes through an intermediate name.
                        let mid = self.define(&canonicalize(Concept::Exists(
                            role.clone(),
                            Box::new(Concept::Atom(filler_name)),
                        )));
                        self.queue.push_back(((*complex).clone(), Concept::Atom(mid)));
                    }
                }
            }
            (Concept::Top | Concept::Atom(_), _) => {
                let sub_name = self.atomize(&sub);
                let sup_name = self.atomize(&sup);
                self.out.push(NormalizedAxiom::Nf1 { sub: sub_name, sup: sup_name });
            }
            (Concept::Exists(role, filler), _) => {
                let filler_name = self.atomize(filler);
                let sup_name = self.atomize(&sup);
                self.out.push(NormalizedAxiom::Nf4 {
                    role: role.clone(),
                    filler: filler_name,
                    sup: sup_name,
                });
            }
            (Concept::And(members), _) => {
                let mut names: Vec<String> =
                    members.clone().iter().map(|m| self.atomize(m)).collect();
                let sup_name = self.atomize(&sup);
                // Binarize left conjunctions.
                while names.len() > 2 {
                    let b = names.pop().unwrap();
                    let a = names.pop().unwrap();
                    let partial = canonicalize(Concept::And(vec![
                        Concept::Atom(a.clone()),
                        Concept::Atom(b.clone()),
                    ]));
                    let mid = match self.cache.get(&partial) {
                        Some(existing) => existing.clone(),
                        None => {
                            let mid = format!("{}{}", self.prefix, self.counter);
                            self.counter += 1;
                            self.cache.insert(partial.clone(), mid.clone());
                            self.map.insert(mid.clone(), partial);
                            self.out.push(NormalizedAxiom::Nf2 {
                                lhs: [a.clone(), b.clone()],
                                sup: mid.clone(),
                            });
                            // Keep the definition usable on the right as well.
                            self.out.push(NormalizedAxiom::Nf1 { sub: mid.clone(), sup: a });
                            self.out.push(NormalizedAxiom::Nf1 { sub: mid.clone(), sup: b });
                            mid
                        }
                    };
                    names.push(mid);
                }
                match names.len() {
                    2 => self.out.push(NormalizedAxiom::Nf2 {
                        lhs: [names[0].clone(), names[1].clone()],
                        sup: sup_name,
                    }),
                    1 => self.out.push(NormalizedAxiom::Nf1 { sub: names.remove(0), sup: sup_name }),
                    _ => unreachable!("canonical And has at least one member"),
                }
            }
        }
    }
}

/// Normalizes a whole ontology with a shared fresh-name namespace.
pub fn normalize(ontology: &Ontology) -> (Vec<NormalizedAxiom>, FreshNameMap) {
    let mut normalizer = Normalizer::new(format!("{}q", crate::model::FRESH_PREFIX));
    for (_, axiom) in ontology.iter() {
        normalizer.add_axiom(axiom);
    }
    normalizer.finish()
}

/// Normalizes a single axiom in isolation. Fresh names are namespaced by
/// `tag` so per-axiom results can be combined without collisions.
pub fn normalize_axiom(axiom: &Axiom, tag: &str) -> (Vec<NormalizedAxiom>, FreshNameMap) {
    let mut normalizer = Normalizer::new(format!("{}q{}_", crate::model::FRESH_PREFIX, tag));
    normalizer.add_axiom(axiom);
    normalizer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Concept;

    fn a(name: &str) -> Concept {
        Concept::atom(name)
    }

    #[test]
    fn equivalence_splits_with_atomic_filler() {
        let axiom = Axiom::equivalent(a("A"), Concept::exists("r", a("B")));
        let (nf, fresh) = normalize_axiom(&axiom, "0");
        assert!(fresh.is_empty());
        assert!(nf.contains(&NormalizedAxiom::Nf3 {
            sub: "A".into(),
            role: "r".into(),
            filler: "B".into()
        }));
        assert!(nf.contains(&NormalizedAxiom::Nf4 {
            role: "r".into(),
            filler: "B".into(),
            sup: "A".into()
        }));
        assert_eq!(nf.len(), 2);
    }

    #[test]
    fn right_conjunction_splits() {
        let axiom = Axiom::sub_class_of(a("A"), Concept::and(vec![a("B"), a("C")]));
        let (nf, fresh) = normalize_axiom(&axiom, "0");
        assert!(fresh.is_empty());
        assert_eq!(
            nf,
            vec![
                NormalizedAxiom::Nf1 { sub: "A".into(), sup: "B".into() },
                NormalizedAxiom::Nf1 { sub: "A".into(), sup: "C".into() },
            ]
        );
    }

    #[test]
    fn complex_existential_lhs_gets_fresh_name() {
        // ∃r.(B ⊓ C) ⊑ D
        let axiom = Axiom::sub_class_of(
            Concept::exists("r", Concept::and(vec![a("B"), a("C")])),
            a("D"),
        );
        let (nf, fresh) = normalize_axiom(&axiom, "0");
        assert_eq!(fresh.len(), 1);
        let fresh_name = fresh.keys().next().unwrap().clone();
        assert!(nf.iter().any(|n| matches!(
            n,
            NormalizedAxiom::Nf4 { role, filler, sup } if role == "r" && *filler == fresh_name && sup == "D"
        )));
        assert!(nf.iter().any(|n| matches!(
            n,
            NormalizedAxiom::Nf2 { lhs, sup } if lhs.contains(&"B".to_string()) && lhs.contains(&"C".to_string()) && *sup == fresh_name
        )));
    }

    #[test]
    fn top_on_the_right_is_dropped() {
        let axiom = Axiom::sub_class_of(a("A"), Concept::Top);
        let (nf, _) = normalize_axiom(&axiom, "0");
        assert!(nf.is_empty());
    }
}
