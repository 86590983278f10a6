//! Consequence-based EL classification and entailment checking.
//!
//! Classification saturates a normal-form axiom set under the completion
//! rules until closure; the result is sound and complete for atomic
//! subsumptions. Entailment of complex GCIs reduces to classification by
//! naming both query sides with reserved fresh atoms.
//!
//! [`EntailmentChecker`] additionally memoizes the per-axiom normal forms of
//! one ontology so that justification search can re-saturate arbitrary axiom
//! subsets cheaply.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::model::{is_fresh_name, Axiom, Concept, Ontology, TOP_NAME};
use crate::normal::{normalize, normalize_axiom, NormalizedAxiom};

#[derive(Debug, Default, Clone)]
pub(crate) struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl SymbolTable {
    fn with_top() -> Self {
        let mut table = SymbolTable::default();
        table.intern(TOP_NAME);
        table
    }

    pub(crate) fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub(crate) fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub(crate) fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

const TOP: u32 = 0;

/// A normalized axiom over interned symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NfI {
    Nf1 { sub: u32, sup: u32 },
    Nf2 { a: u32, b: u32, sup: u32 },
    Nf3 { sub: u32, role: u32, filler: u32 },
    Nf4 { role: u32, filler: u32, sup: u32 },
}

fn intern_nf(table: &mut SymbolTable, nf: &NormalizedAxiom) -> NfI {
    match nf {
        NormalizedAxiom::Nf1 { sub, sup } => {
            NfI::Nf1 { sub: table.intern(sub), sup: table.intern(sup) }
        }
        NormalizedAxiom::Nf2 { lhs, sup } => NfI::Nf2 {
            a: table.intern(&lhs[0]),
            b: table.intern(&lhs[1]),
            sup: table.intern(sup),
        },
        NormalizedAxiom::Nf3 { sub, role, filler } => NfI::Nf3 {
            sub: table.intern(sub),
            role: table.intern(role),
            filler: table.intern(filler),
        },
        NormalizedAxiom::Nf4 { role, filler, sup } => NfI::Nf4 {
            role: table.intern(role),
            filler: table.intern(filler),
            sup: table.intern(sup),
        },
    }
}

#[derive(Debug, Clone, Copy)]
enum Fact {
    Sub(u32, u32),
    Link(u32, u32, u32),
}

/// Saturation over the concept symbols actually occurring in the input,
/// remapped to a dense local id space so subset queries stay proportional to
/// the subset size.
struct Rules {
    local_of: HashMap<u32, u32>,
    globals: Vec<u32>,
    nf1: Vec<Vec<u32>>,
    nf2: Vec<Vec<(u32, u32)>>,
    nf3: Vec<Vec<(u32, u32)>>,
    nf4: HashMap<(u32, u32), Vec<u32>>,
}

impl Rules {
    fn new() -> Self {
        let mut rules = Rules {
            local_of: HashMap::new(),
            globals: Vec::new(),
            nf1: Vec::new(),
            nf2: Vec::new(),
            nf3: Vec::new(),
            nf4: HashMap::new(),
        };
        rules.local(TOP);
        rules
    }

    fn local(&mut self, global: u32) -> u32 {
        if let Some(&id) = self.local_of.get(&global) {
            return id;
        }
        let id = self.globals.len() as u32;
        self.globals.push(global);
        self.local_of.insert(global, id);
        self.nf1.push(Vec::new());
        self.nf2.push(Vec::new());
        self.nf3.push(Vec::new());
        id
    }

    fn add(&mut self, nf: NfI) {
        match nf {
            NfI::Nf1 { sub, sup } => {
                let (sub, sup) = (self.local(sub), self.local(sup));
                self.nf1[sub as usize].push(sup);
            }
            NfI::Nf2 { a, b, sup } => {
                let (a, b, sup) = (self.local(a), self.local(b), self.local(sup));
                self.nf2[a as usize].push((b, sup));
                if a != b {
                    self.nf2[b as usize].push((a, sup));
                }
            }
            NfI::Nf3 { sub, role, filler } => {
                let (sub, filler) = (self.local(sub), self.local(filler));
                self.nf3[sub as usize].push((role, filler));
            }
            NfI::Nf4 { role, filler, sup } => {
                let (filler, sup) = (self.local(filler), self.local(sup));
                self.nf4.entry((role, filler)).or_default().push(sup);
            }
        }
    }

    fn count(&self) -> usize {
        self.globals.len()
    }
}

struct State {
    subsumers: Vec<HashSet<u32>>,
    links: HashSet<(u32, u32, u32)>,
    links_by_target: Vec<Vec<(u32, u32)>>,
    queue: VecDeque<Fact>,
}

impl State {
    fn new(n: usize) -> Self {
        State {
            subsumers: vec![HashSet::new(); n],
            links: HashSet::new(),
            links_by_target: vec![Vec::new(); n],
            queue: VecDeque::new(),
        }
    }

    fn add_sub(&mut self, a: u32, b: u32) {
        if self.subsumers[a as usize].insert(b) {
            self.queue.push_back(Fact::Sub(a, b));
        }
    }

    fn add_link(&mut self, a: u32, role: u32, b: u32) {
        if self.links.insert((a, role, b)) {
            self.links_by_target[b as usize].push((a, role));
            self.queue.push_back(Fact::Link(a, role, b));
        }
    }
}

fn saturate(rules: &Rules) -> State {
    let mut state = State::new(rules.count());
    for a in 0..rules.count() as u32 {
        state.add_sub(a, a);
        state.add_sub(a, TOP); // local id of ⊤ is 0 by construction
    }
    while let Some(fact) = state.queue.pop_front() {
        match fact {
            Fact::Sub(a, b) => {
                for i in 0..rules.nf1[b as usize].len() {
                    let c = rules.nf1[b as usize][i];
                    state.add_sub(a, c);
                }
                for &(other, c) in &rules.nf2[b as usize] {
                    if state.subsumers[a as usize].contains(&other) {
                        state.add_sub(a, c);
                    }
                }
                for &(role, filler) in &rules.nf3[b as usize] {
                    state.add_link(a, role, filler);
                }
                // `a` as a link target: ∃r.b ⊑ c fires for every incoming link.
                let mut i = 0;
                while i < state.links_by_target[a as usize].len() {
                    let (src, role) = state.links_by_target[a as usize][i];
                    if let Some(sups) = rules.nf4.get(&(role, b)) {
                        for &c in sups {
                            state.add_sub(src, c);
                        }
                    }
                    i += 1;
                }
            }
            Fact::Link(a, role, b) => {
                let present: Vec<u32> = state.subsumers[b as usize].iter().copied().collect();
                for bp in present {
                    if let Some(sups) = rules.nf4.get(&(role, bp)) {
                        for &c in sups {
                            state.add_sub(a, c);
                        }
                    }
                }
            }
        }
    }
    state
}

/// The closed set of entailed atomic subsumptions and existential links.
///
/// Reflexive and `⊤`-subsumptions are included; machine-generated names are
/// retained but can be recognized via [`is_fresh_name`].
#[derive(Debug, Clone)]
pub struct SaturationIndex {
    table: SymbolTable,
    /// Local ids follow registration order of the rule set.
    globals: Vec<u32>,
    local_of: HashMap<u32, u32>,
    subsumers: Vec<BTreeSet<u32>>,
    links: BTreeSet<(u32, u32, u32)>,
}

impl SaturationIndex {
    fn local(&self, name: &str) -> Option<u32> {
        self.table.get(name).and_then(|g| self.local_of.get(&g)).copied()
    }

    /// True iff `sup` is an entailed subsumer of `sub`. Names outside the
    /// index behave like fresh atoms: subsumed by themselves, by `⊤`, and by
    /// everything `⊤` is subsumed by.
    pub fn is_subsumer(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == TOP_NAME {
            return true;
        }
        let Some(sup) = self.local(sup) else { return false };
        // An unknown subclass inherits exactly the subsumers of ⊤.
        let sub = self.local(sub).unwrap_or(TOP);
        self.subsumers[sub as usize].contains(&sup)
    }

    /// Borrowed subsumer names of `sub`; empty for names outside the index.
    pub fn subsumer_names(&self, sub: &str) -> Vec<&str> {
        let local = self
            .table
            .get(sub)
            .and_then(|g| self.local_of.get(&g))
            .copied();
        match local {
            Some(local) => self.subsumers[local as usize]
                .iter()
                .map(|&s| self.table.name(self.globals[s as usize]))
                .collect(),
            None => Vec::new(),
        }
    }

    /// All entailed subsumers of `sub`, including `sub` itself and `⊤`.
    pub fn subsumers_of(&self, sub: &str) -> BTreeSet<String> {
        // Unknown names carry ⊤'s subsumers plus themselves.
        let local = self.local(sub).unwrap_or(TOP);
        let mut out: BTreeSet<String> = self.subsumers[local as usize]
            .iter()
            .map(|&s| self.table.name(self.globals[s as usize]).to_string())
            .collect();
        out.insert(sub.to_string());
        out
    }

    /// Concept names tracked by the index, excluding `⊤` and fresh names.
    pub fn concept_names(&self) -> Vec<&str> {
        let role_syms: HashSet<u32> = self
            .links
            .iter()
            .map(|&(_, role, _)| role)
            .collect();
        self.globals
            .iter()
            .filter(|&&g| g != TOP && !role_syms.contains(&g))
            .map(|&g| self.table.name(g))
            .filter(|name| !is_fresh_name(name))
            .collect()
    }

    /// Entailed atomic subsumption pairs over non-fresh names, excluding
    /// reflexive pairs and `⊤` superclasses.
    pub fn atomic_subsumptions(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (local, subs) in self.subsumers.iter().enumerate() {
            let sub_name = self.table.name(self.globals[local]);
            if is_fresh_name(sub_name) || self.globals[local] == TOP {
                continue;
            }
            for &sup in subs {
                if sup as usize == local || self.globals[sup as usize] == TOP {
                    continue;
                }
                let sup_name = self.table.name(self.globals[sup as usize]);
                if is_fresh_name(sup_name) {
                    continue;
                }
                out.push((sub_name, sup_name));
            }
        }
        out
    }

    /// Derived existential links `(source, role, target)` over all names.
    pub fn links(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.links.iter().map(move |&(a, role, b)| {
            (
                self.table.name(self.globals[a as usize]),
                self.table.name(role),
                self.table.name(self.globals[b as usize]),
            )
        })
    }

    pub fn fact_count(&self) -> usize {
        self.subsumers.iter().map(|s| s.len()).sum::<usize>() + self.links.len()
    }
}

/// Saturates a normal-form set under the EL completion rules.
pub fn classify(nf: &[NormalizedAxiom]) -> SaturationIndex {
    let mut table = SymbolTable::with_top();
    let interned: Vec<NfI> = nf.iter().map(|n| intern_nf(&mut table, n)).collect();
    let mut rules = Rules::new();
    // Register every symbol so reflexive facts exist even for names that
    // occur only on rule right-hand sides.
    for id in 0..table.len() as u32 {
        rules.local(id);
    }
    for nf in &interned {
        rules.add(*nf);
    }
    let state = saturate(&rules);
    SaturationIndex {
        subsumers: state.subsumers.iter().map(|s| s.iter().copied().collect()).collect(),
        links: state.links.iter().copied().collect(),
        globals: rules.globals,
        local_of: rules.local_of,
        table,
    }
}

/// Normalizes and classifies a whole ontology.
pub fn classify_ontology(ontology: &Ontology) -> SaturationIndex {
    let (nf, _) = normalize(ontology);
    classify(&nf)
}

/// A query goal pre-normalized against a checker, reusable across many
/// subset entailment tests.
#[derive(Debug, Clone)]
pub struct PreparedGoal {
    nf: Vec<NfI>,
    /// Pairs `(sub, sup)` of query symbols that must all be related.
    checks: Vec<(u32, u32)>,
    /// Concept symbols of the goal signature known to the base table.
    pub(crate) signature_syms: Vec<u32>,
}

/// Entailment oracle for one ontology with memoized per-axiom normal forms.
///
/// Immutable after construction; subset queries may run concurrently.
pub struct EntailmentChecker<'a> {
    ontology: &'a Ontology,
    table: SymbolTable,
    axiom_nf: Vec<Vec<NfI>>,
    /// Signature symbols of the side(s) that can trigger an axiom.
    lhs_syms: Vec<Vec<u32>>,
    full_syms: Vec<Vec<u32>>,
}

impl<'a> EntailmentChecker<'a> {
    pub fn new(ontology: &'a Ontology) -> Self {
        let mut table = SymbolTable::with_top();
        let mut axiom_nf = Vec::with_capacity(ontology.len());
        let mut lhs_syms = Vec::with_capacity(ontology.len());
        let mut full_syms = Vec::with_capacity(ontology.len());
        for (idx, axiom) in ontology.iter() {
            let (nf, _) = normalize_axiom(axiom, &idx.to_string());
            axiom_nf.push(nf.iter().map(|n| intern_nf(&mut table, n)).collect());

            let mut concepts = BTreeSet::new();
            let mut roles = BTreeSet::new();
            let (l, r) = axiom.sides();
            l.signature_into(&mut concepts, &mut roles);
            if matches!(axiom, Axiom::EquivalentClasses(..)) {
                // Equivalences can fire in either direction.
                r.signature_into(&mut concepts, &mut roles);
            }
            let lhs: Vec<u32> = concepts.iter().map(|n| table.intern(n)).collect();
            let mut all_concepts = BTreeSet::new();
            axiom.signature_into(&mut all_concepts, &mut roles);
            let full: Vec<u32> = all_concepts.iter().map(|n| table.intern(n)).collect();
            lhs_syms.push(lhs);
            full_syms.push(full);
        }
        EntailmentChecker { ontology, table, axiom_nf, lhs_syms, full_syms }
    }

    pub fn ontology(&self) -> &'a Ontology {
        self.ontology
    }

    /// Normalizes a query axiom once for repeated subset tests.
    pub fn prepare(&self, goal: &Axiom) -> PreparedGoal {
        // Extend the base table with goal-only names without mutating it.
        let mut table = self.table.clone();
        let sub_name = format!("{}gc", crate::model::FRESH_PREFIX);
        let sup_name = format!("{}gd", crate::model::FRESH_PREFIX);
        let (l, r) = goal.sides();
        let mut axioms = vec![
            Axiom::equivalent(Concept::atom(sub_name.clone()), l.clone()),
            Axiom::equivalent(Concept::atom(sup_name.clone()), r.clone()),
        ];
        let mut normalizer = crate::normal::Normalizer::new(format!("{}g_", crate::model::FRESH_PREFIX));
        for axiom in axioms.drain(..) {
            normalizer.add_axiom(&axiom);
        }
        let (nf, _) = normalizer.finish();
        let nf: Vec<NfI> = nf.iter().map(|n| intern_nf(&mut table, n)).collect();

        let sub_sym = table.get(&sub_name).expect("query name interned");
        let sup_sym = table.get(&sup_name).expect("query name interned");
        let checks = match goal {
            Axiom::SubClassOf(..) => vec![(sub_sym, sup_sym)],
            Axiom::EquivalentClasses(..) => vec![(sub_sym, sup_sym), (sup_sym, sub_sym)],
        };

        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        goal.signature_into(&mut concepts, &mut roles);
        let signature_syms = concepts.iter().filter_map(|n| self.table.get(n)).collect();
        PreparedGoal { nf, checks, signature_syms }
    }

    /// Tests whether the axioms at `subset` entail the prepared goal.
    pub fn entails_subset(
        &self,
        goal: &PreparedGoal,
        subset: impl IntoIterator<Item = usize>,
    ) -> bool {
        let mut rules = Rules::new();
        for idx in subset {
            for nf in &self.axiom_nf[idx] {
                rules.add(*nf);
            }
        }
        for nf in &goal.nf {
            rules.add(*nf);
        }
        let state = saturate(&rules);
        goal.checks.iter().all(|&(sub, sup)| {
            let (Some(&sub), Some(&sup)) = (rules.local_of.get(&sub), rules.local_of.get(&sup))
            else {
                return false;
            };
            state.subsumers[sub as usize].contains(&sup)
        })
    }

    /// Tests the goal against the whole ontology.
    pub fn entails(&self, goal: &Axiom) -> bool {
        let prepared = self.prepare(goal);
        self.entails_subset(&prepared, 0..self.ontology.len())
    }

    pub(crate) fn axiom_lhs_syms(&self, idx: usize) -> &[u32] {
        &self.lhs_syms[idx]
    }

    pub(crate) fn axiom_full_syms(&self, idx: usize) -> &[u32] {
        &self.full_syms[idx]
    }
}

/// One-shot entailment test: `true` iff `ontology ⊨ query`.
pub fn entails(ontology: &Ontology, query: &Axiom) -> bool {
    EntailmentChecker::new(ontology).entails(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dl_axiom;

    fn onto(lines: &[&str]) -> Ontology {
        Ontology::from_axioms(lines.iter().map(|l| parse_dl_axiom(l).unwrap()))
    }

    fn q(line: &str) -> Axiom {
        parse_dl_axiom(line).unwrap()
    }

    #[test]
    fn transitive_chain_closes() {
        let chain = onto(&[
            "A SubClassOf A1",
            "A1 SubClassOf A2",
            "A2 SubClassOf A3",
            "A3 SubClassOf A4",
        ]);
        let index = classify_ontology(&chain);
        assert!(index.is_subsumer("A", "A4"));
        assert!(index.is_subsumer("A1", "A3"));
        assert!(!index.is_subsumer("A4", "A"));
    }

    #[test]
    fn empty_ontology_is_reflexive() {
        let index = classify(&[]);
        let subs = index.subsumers_of("A");
        assert_eq!(subs, ["A".to_string(), TOP_NAME.to_string()].into());
    }

    #[test]
    fn existential_pattern_from_remark() {
        // O' = {A ⊑ ∃r.B, B ⊑ B1, ∃r.B1 ⊑ A1}
        let o = onto(&["A SubClassOf r some B", "B SubClassOf B1", "r some B1 SubClassOf A1"]);
        let index = classify_ontology(&o);
        assert!(index.is_subsumer("A", "A1"));
        assert!(!index.is_subsumer("B", "A1"));
    }

    #[test]
    fn figure_one_entailment() {
        let o = onto(&[
            "DomesticDog SubClassOf Mammal",
            "Mammal SubClassOf Animal",
            "CompanionAnimal EquivalentTo Animal and hasOwner some Human",
            "DomesticDog EquivalentTo hasOwner some Human and Dog",
        ]);
        assert!(entails(&o, &q("DomesticDog SubClassOf CompanionAnimal")));
    }

    #[test]
    fn trivial_queries_hold() {
        let o = onto(&["A SubClassOf B"]);
        assert!(entails(&o, &q("C SubClassOf Top")));
        assert!(entails(&o, &q("C SubClassOf C")));
        assert!(!entails(&o, &q("B SubClassOf A")));
    }

    #[test]
    fn complex_queries_on_both_sides() {
        let o = onto(&["A SubClassOf B and r some C", "C SubClassOf D"]);
        assert!(entails(&o, &q("A SubClassOf r some D")));
        assert!(entails(&o, &q("A and X SubClassOf B")));
        assert!(!entails(&o, &q("A SubClassOf r some X")));
    }

    #[test]
    fn equivalence_queries_check_both_directions() {
        let o = onto(&["A EquivalentTo B"]);
        assert!(entails(&o, &q("A EquivalentTo B")));
        let one_way = onto(&["A SubClassOf B"]);
        assert!(!entails(&one_way, &q("A EquivalentTo B")));
    }

    #[test]
    fn subset_queries_share_prepared_goal() {
        let o = onto(&["A SubClassOf B", "B SubClassOf C", "X SubClassOf Y"]);
        let checker = EntailmentChecker::new(&o);
        let goal = checker.prepare(&q("A SubClassOf C"));
        assert!(checker.entails_subset(&goal, [0, 1]));
        assert!(checker.entails_subset(&goal, [0, 1, 2]));
        assert!(!checker.entails_subset(&goal, [0, 2]));
        assert!(!checker.entails_subset(&goal, []));
    }

    #[test]
    fn saturated_index_respects_invariants() {
        let o = onto(&["A SubClassOf B", "B SubClassOf r some C"]);
        let index = classify_ontology(&o);
        for name in index.concept_names() {
            let subs = index.subsumers_of(name);
            assert!(subs.contains(name));
            assert!(subs.contains(TOP_NAME));
        }
    }
}
