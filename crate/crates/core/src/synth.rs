//! Deterministic synthetic ontology generators for tests and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Axiom, Concept, Ontology};
use crate::normal::NormalizedAxiom;

/// A family of disjoint subsumption chains with occasional conjunctions on
/// the right-hand side. Chains of length `chain_len` guarantee `len - d`
/// conclusion pairs per chain at every atomic distance `d < len`.
pub fn chain_family(chains: usize, chain_len: usize, seed: u64) -> Ontology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ontology = Ontology::new();
    for c in 0..chains {
        for i in 0..chain_len {
            let sub = Concept::atom(format!("C{c}N{i}"));
            let sup = Concept::atom(format!("C{c}N{}", i + 1));
            // Every few steps the parent carries an extra side atom, which
            // varies axiom lengths without changing the chain structure.
            let axiom = if rng.random_range(0..4) == 0 {
                let side = Concept::atom(format!("Side{c}x{i}"));
                Axiom::sub_class_of(sub, Concept::and(vec![sup, side]))
            } else {
                Axiom::sub_class_of(sub, sup)
            };
            ontology.push(axiom, None);
        }
    }
    ontology
}

/// A banded layered DAG emitted directly in normal form: every name has up
/// to two parents in the next layer (its own column and a neighbor), plus a
/// sprinkle of conjunction and existential rules. Ancestor sets stay small,
/// so classification scales linearly in the axiom count.
pub fn layered_normal_forms(axiom_count: usize, width: usize, seed: u64) -> Vec<NormalizedAxiom> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = width.max(2);
    let name = |layer: usize, col: usize| format!("L{layer}N{col}");
    let mut out = Vec::with_capacity(axiom_count);
    let mut layer = 0usize;
    while out.len() < axiom_count {
        for col in 0..width {
            if out.len() >= axiom_count {
                break;
            }
            let sub = name(layer, col);
            match rng.random_range(0..10u32) {
                // Conjunction rule between two column-neighbors.
                0 => out.push(NormalizedAxiom::Nf2 {
                    lhs: [sub.clone(), name(layer, (col + 1) % width)],
                    sup: name(layer + 1, col),
                }),
                // Existential edge up, consumed by a matching Nf4.
                1 => {
                    out.push(NormalizedAxiom::Nf3 {
                        sub: sub.clone(),
                        role: format!("r{}", col % 7),
                        filler: name(layer, (col + 2) % width),
                    });
                    if out.len() < axiom_count {
                        out.push(NormalizedAxiom::Nf4 {
                            role: format!("r{}", col % 7),
                            filler: name(layer, (col + 2) % width),
                            sup: name(layer + 1, col),
                        });
                    }
                }
                _ => {
                    out.push(NormalizedAxiom::Nf1 {
                        sub: sub.clone(),
                        sup: name(layer + 1, col),
                    });
                    if out.len() < axiom_count && rng.random_range(0..3) == 0 {
                        out.push(NormalizedAxiom::Nf1 {
                            sub,
                            sup: name(layer + 1, (col + 1) % width),
                        });
                    }
                }
            }
        }
        layer += 1;
    }
    out.truncate(axiom_count);
    out
}

fn random_concept(rng: &mut ChaCha8Rng, depth: u32, names: usize, roles: usize) -> Concept {
    let pick_atom = |rng: &mut ChaCha8Rng| {
        let i = rng.random_range(0..names + 1);
        if i == names {
            Concept::Top
        } else {
            Concept::atom(format!("N{i}"))
        }
    };
    if depth == 0 {
        return pick_atom(rng);
    }
    match rng.random_range(0..10u32) {
        0..=3 => pick_atom(rng),
        4..=6 => {
            let role = format!("r{}", rng.random_range(0..roles));
            Concept::exists(role, random_concept(rng, depth - 1, names, roles))
        }
        _ => Concept::and(vec![
            random_concept(rng, depth - 1, names, roles),
            random_concept(rng, depth - 1, names, roles),
        ]),
    }
}

/// A random small EL ontology for differential testing: up to `max_axioms`
/// GCIs over `names` concept names and `roles` role names, nesting depth at
/// most 2. Mostly inclusions with occasional equivalences.
pub fn random_small_ontology(
    rng: &mut ChaCha8Rng,
    max_axioms: usize,
    names: usize,
    roles: usize,
) -> Ontology {
    let count = rng.random_range(1..=max_axioms.max(1));
    let mut ontology = Ontology::new();
    for _ in 0..count {
        let left = random_concept(rng, 2, names, roles);
        let right = random_concept(rng, 2, names, roles);
        let axiom = if rng.random_range(0..5u32) == 0 {
            Axiom::equivalent(left, right)
        } else {
            Axiom::sub_class_of(left, right)
        };
        ontology.push(axiom, None);
    }
    ontology
}
