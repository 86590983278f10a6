//! Independent entailment oracle for differential testing.
//!
//! Decides `O ⊨ C ⊑ D` by building the canonical model of `C` with respect
//! to `O` as a labeled graph: one node per realized existential filler, label
//! sets closed under conjunction decomposition and GCI application, where GCI
//! applicability is checked by structural simulation against the partial
//! model. Membership of `D` at the root decides the query.
//!
//! The construction works on the original axioms and shares nothing with the
//! normalization/saturation pipeline in [`crate::reasoner`].

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::model::{Axiom, Concept, Ontology};

#[derive(Debug, Error)]
#[error("oracle bound exceeded: ontology has {axioms} axioms, bound is {bound}")]
pub struct OracleBoundExceeded {
    pub axioms: usize,
    pub bound: usize,
}

/// Default ontology size the oracle accepts.
pub const DEFAULT_ORACLE_BOUND: usize = 12;

struct Node {
    labels: HashSet<Concept>,
    edges: Vec<(String, usize)>,
}

struct CanonicalModel {
    nodes: Vec<Node>,
    node_of: HashMap<Concept, usize>,
}

impl CanonicalModel {
    fn node_for(&mut self, concept: &Concept) -> usize {
        if let Some(&id) = self.node_of.get(concept) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node { labels: [concept.clone()].into(), edges: Vec::new() });
        self.node_of.insert(concept.clone(), id);
        id
    }

    /// Structural membership of `concept` at `node` in the partial model.
    fn satisfies(&self, node: usize, concept: &Concept) -> bool {
        match concept {
            Concept::Top => true,
            Concept::Atom(_) => self.nodes[node].labels.contains(concept),
            Concept::And(members) => members.iter().all(|m| self.satisfies(node, m)),
            Concept::Exists(role, filler) => self.nodes[node]
                .edges
                .iter()
                .any(|(r, target)| r == role && self.satisfies(*target, filler)),
        }
    }
}

fn gcis(ontology: &Ontology) -> Vec<(Concept, Concept)> {
    let mut out = Vec::new();
    for (_, axiom) in ontology.iter() {
        match axiom {
            Axiom::SubClassOf(l, r) => out.push((l.clone(), r.clone())),
            Axiom::EquivalentClasses(l, r) => {
                out.push((l.clone(), r.clone()));
                out.push((r.clone(), l.clone()));
            }
        }
    }
    out
}

fn build_model(ontology: &Ontology, root_concept: &Concept) -> (CanonicalModel, usize) {
    let gcis = gcis(ontology);
    let mut model = CanonicalModel { nodes: Vec::new(), node_of: HashMap::new() };
    let root = model.node_for(root_concept);

    loop {
        let mut changed = false;

        // Decompose labels: conjunctions spill members, existentials grow
        // witness edges.
        for node in 0..model.nodes.len() {
            let labels: Vec<Concept> = model.nodes[node].labels.iter().cloned().collect();
            for label in labels {
                match label {
                    Concept::And(members) => {
                        for member in members {
                            if model.nodes[node].labels.insert(member) {
                                changed = true;
                            }
                        }
                    }
                    Concept::Exists(role, filler) => {
                        let target = model.node_for(&filler);
                        let edge = (role, target);
                        if !model.nodes[node].edges.contains(&edge) {
                            model.nodes[node].edges.push(edge);
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
        }

        // Apply GCIs wherever the left side is realized.
        for node in 0..model.nodes.len() {
            for (lhs, rhs) in &gcis {
                if !model.nodes[node].labels.contains(rhs) && model.satisfies(node, lhs) {
                    model.nodes[node].labels.insert(rhs.clone());
                    changed = true;
                }
            }
        }

        if !changed {
            return (model, root);
        }
    }
}

fn entailed(ontology: &Ontology, sub: &Concept, sup: &Concept) -> bool {
    let (model, root) = build_model(ontology, sub);
    model.satisfies(root, sup)
}

/// Decides `ontology ⊨ query` by canonical-model construction.
pub fn oracle_entails(
    ontology: &Ontology,
    query: &Axiom,
    bound: usize,
) -> Result<bool, OracleBoundExceeded> {
    if ontology.len() > bound {
        return Err(OracleBoundExceeded { axioms: ontology.len(), bound });
    }
    Ok(match query.canonicalized() {
        Axiom::SubClassOf(l, r) => entailed(ontology, &l, &r),
        Axiom::EquivalentClasses(l, r) => {
            entailed(ontology, &l, &r) && entailed(ontology, &r, &l)
        }
    })
}
