//! Direct-subsumption graph over a classified ontology and the atomic
//! distance metric used to stratify conclusions.
//!
//! Mutually subsuming names collapse into one equivalence class before the
//! transitive reduction; `⊤` and fresh names are excluded. Distance between
//! two names is the length of the shortest chain of direct subsumptions
//! between their classes (0 within a class).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::reasoner::SaturationIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown concept name: {0}")]
pub struct UnknownName(pub String);

#[derive(Debug, Clone)]
pub struct TaxonomyGraph {
    /// Equivalence classes, each sorted; the class vector itself is sorted by
    /// its first member for determinism.
    classes: Vec<Vec<String>>,
    class_of: HashMap<String, usize>,
    /// Direct super-class edges per class.
    supers: Vec<BTreeSet<usize>>,
}

/// Transitive reduction of the entailed atomic subsumption order.
pub fn build_taxonomy(index: &SaturationIndex) -> TaxonomyGraph {
    let names: Vec<&str> = {
        let mut v = index.concept_names();
        v.sort_unstable();
        v
    };

    // Collapse mutual subsumptions into classes keyed by their least member.
    let mut class_of_name: BTreeMap<&str, &str> = BTreeMap::new();
    let mut members: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for &name in &names {
        let rep = index
            .subsumer_names(name)
            .into_iter()
            .filter(|&sup| sup == name || index.is_subsumer(sup, name))
            .filter(|sup| !crate::model::is_fresh_name(sup) && *sup != crate::model::TOP_NAME)
            .min()
            .unwrap_or(name);
        class_of_name.insert(name, rep);
        members.entry(rep).or_default().push(name);
    }

    let reps: Vec<&str> = members.keys().copied().collect();
    let rep_id: HashMap<&str, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    // Strict subsumption between class representatives.
    let strict_supers: Vec<BTreeSet<usize>> = reps
        .iter()
        .map(|&rep| {
            index
                .subsumer_names(rep)
                .into_iter()
                .filter_map(|sup| class_of_name.get(sup))
                .filter_map(|&sup_rep| rep_id.get(sup_rep))
                .copied()
                .filter(|&sup_id| reps[sup_id] != rep)
                .collect()
        })
        .collect();

    // An edge is direct when no third class sits strictly between.
    let mut supers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); reps.len()];
    for (sub_id, ups) in strict_supers.iter().enumerate() {
        for &sup_id in ups {
            let has_intermediate = ups
                .iter()
                .any(|&mid| mid != sup_id && strict_supers[mid].contains(&sup_id));
            if !has_intermediate {
                supers[sub_id].insert(sup_id);
            }
        }
    }

    TaxonomyGraph {
        classes: reps
            .iter()
            .map(|rep| members[rep].iter().map(|s| s.to_string()).collect())
            .collect(),
        class_of: class_of_name
            .iter()
            .map(|(&name, &rep)| (name.to_string(), rep_id[rep]))
            .collect(),
        supers,
    }
}

impl TaxonomyGraph {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_id(&self, name: &str) -> Result<usize, UnknownName> {
        self.class_of
            .get(name)
            .copied()
            .ok_or_else(|| UnknownName(name.to_string()))
    }

    pub fn class_members(&self, class: usize) -> &[String] {
        &self.classes[class]
    }

    /// All concept names in the graph, sorted.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().flatten().map(String::as_str)
    }

    /// Direct super-class edges as `(sub_rep, sup_rep)` name pairs.
    pub fn direct_edges(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (sub_id, ups) in self.supers.iter().enumerate() {
            for &sup_id in ups {
                out.push((self.classes[sub_id][0].as_str(), self.classes[sup_id][0].as_str()));
            }
        }
        out
    }

    pub fn equivalence_classes(&self) -> impl Iterator<Item = &[String]> {
        self.classes.iter().filter(|c| c.len() > 1).map(Vec::as_slice)
    }

    /// Upward BFS distances from `class` to every reachable class, capped at
    /// `max_distance` when given.
    pub fn distances_from(&self, class: usize, max_distance: Option<u32>) -> HashMap<usize, u32> {
        let mut dist = HashMap::new();
        dist.insert(class, 0);
        let mut queue = VecDeque::from([class]);
        while let Some(at) = queue.pop_front() {
            let d = dist[&at];
            if max_distance.is_some_and(|cap| d >= cap) {
                continue;
            }
            for &next in &self.supers[at] {
                if !dist.contains_key(&next) {
                    dist.insert(next, d + 1);
                    queue.push_back(next);
                }
            }
        }
        dist
    }

    /// Length of the shortest direct-subsumption chain from `a` up to `b`;
    /// `Some(0)` within a class, `None` when `b` is not an entailed subsumer.
    pub fn atomic_distance(&self, a: &str, b: &str) -> Result<Option<u32>, UnknownName> {
        let from = self.class_id(a)?;
        let to = self.class_id(b)?;
        if from == to {
            return Ok(Some(0));
        }
        let mut dist: HashMap<usize, u32> = HashMap::from([(from, 0)]);
        let mut queue = VecDeque::from([from]);
        while let Some(at) = queue.pop_front() {
            let d = dist[&at];
            for &next in &self.supers[at] {
                if next == to {
                    return Ok(Some(d + 1));
                }
                if !dist.contains_key(&next) {
                    dist.insert(next, d + 1);
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Histogram of atomic distances over all entailed subsumption pairs
    /// (including distance 0 pairs inside nontrivial equivalence classes).
    pub fn distance_histogram(&self) -> BTreeMap<u32, u64> {
        let mut hist = BTreeMap::new();
        for class in 0..self.class_count() {
            let size = self.classes[class].len() as u64;
            if size > 1 {
                *hist.entry(0).or_insert(0) += size * (size - 1);
            }
            for (&other, &d) in self.distances_from(class, None).iter() {
                if other != class {
                    let pairs = size * self.classes[other].len() as u64;
                    *hist.entry(d).or_insert(0) += pairs;
                }
            }
        }
        hist
    }

    /// All name pairs `(a, b)` whose atomic distance is exactly `d`, sorted.
    pub fn pairs_at_distance(&self, d: u32) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for class in 0..self.class_count() {
            for (&other, &dist) in self.distances_from(class, Some(d)).iter() {
                if dist != d || other == class {
                    continue;
                }
                for a in &self.classes[class] {
                    for b in &self.classes[other] {
                        out.push((a.clone(), b.clone()));
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dl_axiom;
    use crate::model::Ontology;
    use crate::reasoner::classify_ontology;

    fn taxonomy(lines: &[&str]) -> TaxonomyGraph {
        let onto = Ontology::from_axioms(lines.iter().map(|l| parse_dl_axiom(l).unwrap()));
        build_taxonomy(&classify_ontology(&onto))
    }

    #[test]
    fn chain_yields_a_path() {
        let g = taxonomy(&[
            "A SubClassOf A1",
            "A1 SubClassOf A2",
            "A2 SubClassOf A3",
            "A3 SubClassOf A4",
        ]);
        assert_eq!(g.direct_edges().len(), 4);
        assert_eq!(g.atomic_distance("A", "A4").unwrap(), Some(4));
        assert_eq!(g.atomic_distance("A", "A1").unwrap(), Some(1));
        assert_eq!(g.atomic_distance("A", "A").unwrap(), Some(0));
        assert_eq!(g.atomic_distance("A4", "A").unwrap(), None);
    }

    #[test]
    fn mutual_subsumption_collapses() {
        let g = taxonomy(&["A SubClassOf B", "B SubClassOf A"]);
        assert_eq!(g.class_count(), 1);
        assert!(g.direct_edges().is_empty());
        assert_eq!(g.atomic_distance("A", "B").unwrap(), Some(0));
    }

    #[test]
    fn existential_pattern_is_one_direct_edge() {
        let g = taxonomy(&[
            "A SubClassOf r some B",
            "B SubClassOf B1",
            "r some B1 SubClassOf A1",
        ]);
        assert_eq!(g.atomic_distance("A", "A1").unwrap(), Some(1));
        assert!(g.direct_edges().contains(&("A", "A1")));
    }

    #[test]
    fn diamonds_take_the_shortest_path() {
        let g = taxonomy(&[
            "A SubClassOf B",
            "B SubClassOf C",
            "C SubClassOf D",
            "A SubClassOf X",
            "X SubClassOf D",
        ]);
        assert_eq!(g.atomic_distance("A", "D").unwrap(), Some(2));
    }

    #[test]
    fn distance_one_iff_direct_edge() {
        let g = taxonomy(&["A SubClassOf B", "B SubClassOf C", "A SubClassOf C"]);
        // A ⊑ C has intermediate B, so the only A-edge is A → B.
        assert_eq!(g.atomic_distance("A", "C").unwrap(), Some(2));
        let edges = g.direct_edges();
        assert!(edges.contains(&("A", "B")));
        assert!(edges.contains(&("B", "C")));
        assert!(!edges.contains(&("A", "C")));
    }

    #[test]
    fn unknown_names_error() {
        let g = taxonomy(&["A SubClassOf B"]);
        assert!(g.atomic_distance("A", "Missing").is_err());
    }

    #[test]
    fn histogram_counts_pairs() {
        let g = taxonomy(&["A SubClassOf B", "B SubClassOf C"]);
        let hist = g.distance_histogram();
        assert_eq!(hist.get(&1), Some(&2)); // A→B, B→C
        assert_eq!(hist.get(&2), Some(&1)); // A→C
    }

    #[test]
    fn pairs_at_distance_enumerates_sorted() {
        let g = taxonomy(&["A SubClassOf B", "B SubClassOf C", "X SubClassOf B"]);
        assert_eq!(
            g.pairs_at_distance(2),
            vec![("A".to_string(), "C".to_string()), ("X".to_string(), "C".to_string())]
        );
    }
}
