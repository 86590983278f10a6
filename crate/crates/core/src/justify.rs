//! Subset-minimal justification extraction: relevance pruning, contraction to
//! a single minimal justification, and hitting-set-tree enumeration of
//! several so the smallest can be chosen.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::model::Axiom;
use crate::reasoner::{EntailmentChecker, PreparedGoal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("goal is not entailed by the given axioms")]
pub struct NotEntailed;

/// A set of axiom indices that entails the conclusion and is subset-minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JustificationSet {
    pub conclusion: Axiom,
    pub axioms: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Stop after this many distinct justifications.
    pub max_count: usize,
    /// Stop after this many entailment tests.
    pub max_tests: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_count: 16, max_tests: 5_000 }
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub justifications: Vec<JustificationSet>,
    /// True when the budget ran out before the tree was exhausted.
    pub truncated: bool,
    pub tests_used: usize,
}

struct Counter<'g> {
    checker: &'g EntailmentChecker<'g>,
    goal: &'g PreparedGoal,
    tests: usize,
    max_tests: usize,
}

impl<'g> Counter<'g> {
    fn entails(&mut self, subset: &[usize]) -> bool {
        self.tests += 1;
        self.checker.entails_subset(self.goal, subset.iter().copied())
    }

    fn exhausted(&self) -> bool {
        self.tests >= self.max_tests
    }
}

/// Signature-reachability over-approximation of the axioms relevant to
/// `goal`: starting from the goal signature, repeatedly pulls in axioms whose
/// triggering side intersects the reached set, closing over their full
/// signature. Falls back to the whole ontology if the pruned set fails a
/// verification entailment test.
pub fn relevant_subset(
    checker: &EntailmentChecker<'_>,
    goal: &Axiom,
) -> Result<BTreeSet<usize>, NotEntailed> {
    let prepared = checker.prepare(goal);
    let n = checker.ontology().len();

    let mut reached: HashSet<u32> = prepared.signature_syms.iter().copied().collect();
    let mut selected: BTreeSet<usize> = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for idx in 0..n {
            if selected.contains(&idx) {
                continue;
            }
            if checker.axiom_lhs_syms(idx).iter().any(|s| reached.contains(s)) {
                selected.insert(idx);
                reached.extend(checker.axiom_full_syms(idx).iter().copied());
                changed = true;
            }
        }
    }

    let subset: Vec<usize> = selected.iter().copied().collect();
    if checker.entails_subset(&prepared, subset.iter().copied()) {
        return Ok(selected);
    }
    // The over-approximation missed something; take the full ontology if the
    // goal is entailed at all.
    if checker.entails_subset(&prepared, 0..n) {
        Ok((0..n).collect())
    } else {
        Err(NotEntailed)
    }
}

fn shrink_with(counter: &mut Counter<'_>, candidates: &[usize]) -> Vec<usize> {
    let mut current: Vec<usize> = candidates.to_vec();

    // Sliding-window contraction: drop whole windows while entailment holds.
    let mut window = current.len() / 2;
    while window >= 2 {
        let mut at = 0;
        while at < current.len() && current.len() > 1 {
            let mut trial = Vec::with_capacity(current.len().saturating_sub(window));
            trial.extend_from_slice(&current[..at]);
            trial.extend_from_slice(&current[(at + window).min(current.len())..]);
            if !trial.is_empty() && counter.entails(&trial) {
                current = trial;
            } else {
                at += window;
            }
        }
        window /= 2;
    }

    // One linear deletion pass guarantees subset-minimality.
    let mut at = 0;
    while at < current.len() {
        let mut trial = current.clone();
        trial.remove(at);
        if !trial.is_empty() && counter.entails(&trial) {
            current = trial;
        } else {
            at += 1;
        }
    }
    current
}

fn verified(
    counter: &mut Counter<'_>,
    conclusion: &Axiom,
    axioms: Vec<usize>,
) -> JustificationSet {
    // Invariant check on every produced justification: it entails the goal
    // and no single axiom can be dropped.
    debug_assert!(counter.checker.entails_subset(counter.goal, axioms.iter().copied()));
    for drop in &axioms {
        let rest: Vec<usize> = axioms.iter().copied().filter(|a| a != drop).collect();
        assert!(
            rest.is_empty() || !counter.entails(&rest),
            "non-minimal justification produced for {conclusion}"
        );
    }
    JustificationSet { conclusion: conclusion.clone(), axioms: axioms.into_iter().collect() }
}

/// Contracts an entailing candidate set to one subset-minimal justification.
/// Deterministic given the candidate order.
pub fn shrink(
    checker: &EntailmentChecker<'_>,
    goal: &Axiom,
    candidates: &[usize],
) -> Result<JustificationSet, NotEntailed> {
    let prepared = checker.prepare(goal);
    let mut counter =
        Counter { checker, goal: &prepared, tests: 0, max_tests: usize::MAX };
    if !counter.entails(candidates) {
        return Err(NotEntailed);
    }
    let core = shrink_with(&mut counter, candidates);
    Ok(verified(&mut counter, goal, core))
}

/// Reiter-style hitting-set-tree enumeration of distinct subset-minimal
/// justifications. Complete when the budget is not exhausted.
pub fn enumerate_justifications(
    checker: &EntailmentChecker<'_>,
    goal: &Axiom,
    candidates: &BTreeSet<usize>,
    budget: Budget,
) -> Result<EnumerationResult, NotEntailed> {
    let prepared = checker.prepare(goal);
    let mut counter =
        Counter { checker, goal: &prepared, tests: 0, max_tests: budget.max_tests };
    let all: Vec<usize> = candidates.iter().copied().collect();
    if !counter.entails(&all) {
        return Err(NotEntailed);
    }

    let core = shrink_with(&mut counter, &all);
    let root = verified(&mut counter, goal, core);
    let mut found: Vec<JustificationSet> = vec![root.clone()];
    let mut seen: HashSet<BTreeSet<usize>> = [root.axioms.clone()].into();

    let mut queue: VecDeque<(BTreeSet<usize>, JustificationSet)> =
        VecDeque::from([(BTreeSet::new(), root)]);
    let mut visited_bans: HashSet<BTreeSet<usize>> = HashSet::new();
    let mut truncated = false;

    'search: while let Some((banned, just)) = queue.pop_front() {
        for &removed in &just.axioms {
            if found.len() >= budget.max_count || counter.exhausted() {
                truncated = true;
                break 'search;
            }
            let mut banned_next = banned.clone();
            banned_next.insert(removed);
            if !visited_bans.insert(banned_next.clone()) {
                continue;
            }
            let rest: Vec<usize> =
                all.iter().copied().filter(|a| !banned_next.contains(a)).collect();
            if rest.is_empty() || !counter.entails(&rest) {
                continue; // branch closed: banned set hits every justification
            }
            let core = shrink_with(&mut counter, &rest);
            let next = verified(&mut counter, goal, core);
            if seen.insert(next.axioms.clone()) {
                found.push(next.clone());
            }
            queue.push_back((banned_next, next));
        }
    }
    if !queue.is_empty() {
        truncated = truncated || counter.exhausted();
    }

    Ok(EnumerationResult { justifications: found, truncated, tests_used: counter.tests })
}

/// The smallest-cardinality justification among the enumerated ones, with
/// ties broken by lexicographic index order. The boolean reports whether
/// enumeration was truncated (result is then best-effort).
pub fn min_size_justification(
    checker: &EntailmentChecker<'_>,
    goal: &Axiom,
    budget: Budget,
) -> Result<(JustificationSet, bool), NotEntailed> {
    let candidates = relevant_subset(checker, goal)?;
    let result = enumerate_justifications(checker, goal, &candidates, budget)?;
    let best = result
        .justifications
        .into_iter()
        .min_by(|a, b| {
            a.axioms
                .len()
                .cmp(&b.axioms.len())
                .then_with(|| a.axioms.cmp(&b.axioms))
        })
        .expect("enumeration yields at least one justification");
    Ok((best, result.truncated))
}
