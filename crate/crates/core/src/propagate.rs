//! Forward chaining to the least fixpoint.
//!
//! Evaluation is semi-naive: a rule instance is only considered in a
//! round if at least one of its antecedents was new in the previous
//! round. Atoms derived in a round become visible in the next one, so the
//! trace order is a deterministic function of the inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::fol::{unify_with, Atom, HornRule, Substitution};
use crate::translate::FactBase;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Conflict {
    pub vertex: String,
    /// The two distinct states, in lexicographic order.
    pub states: (String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub substitution: Substitution,
    pub atom: Atom,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropagationResult {
    /// Atoms obtained by rule application that were not initial facts.
    pub derived: BTreeSet<Atom>,
    /// Vertices holding two distinct states across facts and derived atoms.
    pub conflicts: Vec<Conflict>,
    /// First derivation of every derived atom, in derivation order.
    pub trace: Vec<TraceStep>,
}

/// Atoms grouped by predicate, for body matching.
#[derive(Debug, Default, Clone)]
pub(crate) struct Index<'a> {
    by_pred: BTreeMap<&'a str, Vec<&'a Atom>>,
}

impl<'a> Index<'a> {
    pub(crate) fn new(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut by_pred: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for a in atoms {
            by_pred.entry(a.predicate.as_str()).or_default().push(a);
        }
        Index { by_pred }
    }

    pub(crate) fn candidates(&self, pattern: &Atom) -> &[&'a Atom] {
        self.by_pred
            .get(pattern.predicate.as_str())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Every substitution extending `s` under which all of `body` is in
/// `index`, in index order. `on_match` also receives the matched atoms.
pub(crate) fn match_body<'a>(
    body: &[Atom],
    index: &Index<'a>,
    s: &Substitution,
    matched: &mut Vec<&'a Atom>,
    on_match: &mut dyn FnMut(&Substitution, &[&'a Atom]),
) {
    let Some((first, rest)) = body.split_first() else {
        on_match(s, matched);
        return;
    };
    let pattern = first.apply(s);
    for cand in index.candidates(&pattern) {
        if let Some(s2) = unify_with(&pattern, cand, s) {
            matched.push(cand);
            match_body(rest, index, &s2, matched, on_match);
            matched.pop();
        }
    }
}

pub fn forward_propagate(facts: &FactBase, rules: &[HornRule]) -> PropagationResult {
    let mut known: BTreeSet<Atom> = facts.atoms().clone();
    let mut delta: BTreeSet<Atom> = known.clone();
    let mut result = PropagationResult::default();
    let mut first_round = true;

    while !delta.is_empty() || first_round {
        let mut fresh: BTreeSet<Atom> = BTreeSet::new();
        {
            let index = Index::new(known.iter());
            for rule in rules {
                let mut on_match = |s: &Substitution, used: &[&Atom]| {
                    if !first_round && !used.iter().any(|a| delta.contains(*a)) {
                        return;
                    }
                    let head = rule.consequent.apply(s);
                    if !head.is_ground() || known.contains(&head) || fresh.contains(&head) {
                        return;
                    }
                    result.trace.push(TraceStep {
                        rule: rule.name.clone(),
                        substitution: restrict(s, rule),
                        atom: head.clone(),
                    });
                    fresh.insert(head);
                };
                match_body(
                    &rule.antecedents,
                    &index,
                    &Substitution::new(),
                    &mut Vec::new(),
                    &mut on_match,
                );
            }
        }
        first_round = false;
        known.extend(fresh.iter().cloned());
        result.derived.extend(fresh.iter().cloned());
        delta = fresh;
    }

    result.conflicts = conflicts(facts.atoms().iter().chain(&result.derived));
    result
}

fn restrict(s: &Substitution, rule: &HornRule) -> Substitution {
    let vars = rule.variables();
    Substitution::from_pairs(
        s.iter()
            .filter(|(v, _)| vars.contains(v))
            .map(|(v, t)| (v, t.clone())),
    )
    .expect("restriction of a consistent substitution")
}

fn conflicts<'a>(atoms: impl Iterator<Item = &'a Atom>) -> Vec<Conflict> {
    let mut states: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (v, s) in atoms.filter_map(Atom::as_ground_hold) {
        states.entry(v).or_default().insert(s);
    }
    let mut out = Vec::new();
    for (vertex, set) in states {
        let set: Vec<&str> = set.into_iter().collect();
        for (i, a) in set.iter().enumerate() {
            for b in &set[i + 1..] {
                out.push(Conflict {
                    vertex: vertex.to_string(),
                    states: (a.to_string(), b.to_string()),
                });
            }
        }
    }
    out
}

/// `goal ∈ facts ∪ derived`.
pub fn entails(facts: &FactBase, rules: &[HornRule], goal: &Atom) -> bool {
    facts.contains(goal) || forward_propagate(facts, rules).derived.contains(goal)
}

/// Re-run a trace step by step: each step's rule instance must have all
/// its antecedents among the facts and earlier steps. Returns the atoms
/// regenerated.
pub fn replay_trace(
    facts: &FactBase,
    rules: &[HornRule],
    trace: &[TraceStep],
) -> Result<BTreeSet<Atom>, String> {
    let mut known: BTreeSet<Atom> = facts.atoms().clone();
    let mut regenerated = BTreeSet::new();
    for (i, step) in trace.iter().enumerate() {
        let rule = rules
            .iter()
            .find(|r| r.name == step.rule)
            .ok_or_else(|| format!("step {i}: unknown rule `{}`", step.rule))?;
        let inst = rule.apply(&step.substitution);
        if inst.consequent != step.atom {
            return Err(format!("step {i}: rule `{}` does not conclude {}", rule.name, step.atom));
        }
        if let Some(missing) = inst.antecedents.iter().find(|a| !known.contains(*a)) {
            return Err(format!("step {i}: antecedent {missing} not yet established"));
        }
        known.insert(step.atom.clone());
        regenerated.insert(step.atom.clone());
    }
    Ok(regenerated)
}
