//! Backward chaining with abducible action atoms.
//!
//! A `hold` subgoal is justified, in this order, by an initial fact, by a
//! propagation rule whose consequent unifies with it, or by an action
//! rule whose effect unifies with it. Choosing an action assumes the
//! action atom and opens a new time segment: its preconditions are
//! subgoals at the moment before the action fires.
//!
//! Search deepens on the number of assumed actions, so the first plan
//! found uses as few actions as possible. Every candidate is replayed and
//! only a candidate with a replayable linearization is returned.

use std::collections::BTreeMap;
use std::fmt;

use super::replay::replay_actions;
use super::{order, Justification, PlanError, PlanGraph, PlanProblem, Proof};
use crate::fol::{unify_with, Atom, HornRule, Substitution, Term, HOLD};
use crate::propagate::Index;
use crate::translate::ClauseSet;

/// Exhaustion certificate: nothing within `max_actions` replays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoPlan {
    pub goal: Atom,
    pub max_actions: usize,
    /// Candidate justification graphs built, over all depths.
    pub candidates: usize,
    /// Distinct action sequences replayed and rejected.
    pub rejected_sequences: usize,
}

impl fmt::Display for NoPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no plan for {} within {} actions ({} candidate graphs, {} sequences rejected by replay)",
            self.goal, self.max_actions, self.candidates, self.rejected_sequences
        )
    }
}

/// One partial solution of a conjunction.
struct Partial {
    subst: Substitution,
    proofs: Vec<Proof>,
    actions: usize,
}

struct Solver<'a> {
    clauses: &'a ClauseSet,
    facts: Index<'a>,
    fresh: usize,
}

impl<'a> Solver<'a> {
    fn new(clauses: &'a ClauseSet) -> Self {
        Solver {
            clauses,
            facts: Index::new(clauses.facts().iter()),
            fresh: 0,
        }
    }

    fn rename(&mut self, rule: &HornRule) -> (HornRule, String) {
        self.fresh += 1;
        let suffix = self.fresh.to_string();
        (rule.rename_apart(&suffix), suffix)
    }

    /// Bindings for the original rule's variables, read back through its
    /// renamed copy.
    fn original_bindings(rule: &HornRule, suffix: &str, s: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for v in rule.variables() {
            let t = s.apply_term(&Term::Variable(format!("{v}_{suffix}")));
            out.bind(v, &t);
        }
        out
    }

    /// All proofs of `goal` under `s` using at most `budget` actions.
    /// `segment` holds the ground subgoals being expanded since the last
    /// action boundary; re-expanding one of them would loop.
    fn prove(&mut self, goal: &Atom, s: &Substitution, budget: usize, segment: &mut Vec<Atom>) -> Vec<Partial> {
        let goal = goal.apply(s);
        let mut out = Vec::new();

        for fact in self.facts.candidates(&goal) {
            if let Some(s2) = unify_with(&goal, fact, s) {
                out.push(Partial {
                    subst: s2,
                    proofs: vec![Proof::Fact((*fact).clone())],
                    actions: 0,
                });
            }
        }

        if goal.predicate != HOLD || (goal.is_ground() && segment.contains(&goal)) {
            return out;
        }
        segment.push(goal.clone());
        let clauses = self.clauses;

        for rule in clauses.propagation_rules() {
            let (renamed, suffix) = self.rename(rule);
            let Some(s1) = unify_with(&renamed.consequent, &goal, s) else {
                continue;
            };
            for body in self.prove_all(&renamed.antecedents, &s1, budget, segment) {
                let conclusion = goal.apply(&body.subst);
                out.push(Partial {
                    proofs: vec![Proof::Rule {
                        justification: Justification::Propagation,
                        rule: rule.name.clone(),
                        substitution: Self::original_bindings(rule, &suffix, &body.subst),
                        conclusion,
                        premises: body.proofs,
                    }],
                    subst: body.subst,
                    actions: body.actions,
                });
            }
        }

        if budget > 0 {
            for ar in clauses.action_rules() {
                let (renamed, suffix) = self.rename(&ar.rule);
                let Some(s1) = unify_with(&renamed.consequent, &goal, s) else {
                    continue;
                };
                let mut earlier = Vec::new();
                let pre = &renamed.antecedents[1..];
                for body in self.prove_all(pre, &s1, budget - 1, &mut earlier) {
                    let action = renamed.antecedents[0].apply(&body.subst);
                    if !action.is_ground() {
                        continue;
                    }
                    let mut premises = vec![Proof::Action(action)];
                    premises.extend(body.proofs);
                    out.push(Partial {
                        proofs: vec![Proof::Rule {
                            justification: Justification::Action,
                            rule: ar.rule.name.clone(),
                            substitution: Self::original_bindings(&ar.rule, &suffix, &body.subst),
                            conclusion: goal.apply(&body.subst),
                            premises,
                        }],
                        subst: body.subst,
                        actions: body.actions + 1,
                    });
                }
            }
        }

        segment.pop();
        out
    }

    fn prove_all(&mut self, goals: &[Atom], s: &Substitution, budget: usize, segment: &mut Vec<Atom>) -> Vec<Partial> {
        let Some((first, rest)) = goals.split_first() else {
            return vec![Partial {
                subst: s.clone(),
                proofs: Vec::new(),
                actions: 0,
            }];
        };
        let mut out = Vec::new();
        for head in self.prove(first, s, budget, segment) {
            for tail in self.prove_all(rest, &head.subst, budget - head.actions, segment) {
                let mut proofs = head.proofs.clone();
                proofs.extend(tail.proofs);
                out.push(Partial {
                    subst: tail.subst,
                    proofs,
                    actions: head.actions + tail.actions,
                });
            }
        }
        out
    }
}

/// Find a plan with the fewest actions, up to `p.max_actions`.
///
/// Within one action count, candidates are visited in search order and,
/// per candidate, linearizations in lexicographic order; the first that
/// replays is returned, with that linearization as `action_order`.
pub fn abduce_plan(p: &PlanProblem) -> Result<PlanGraph, PlanError> {
    if p.clause_set.signature().arity(HOLD).is_some_and(|n| n != 2) {
        return Err(PlanError::MalformedClauseSet(
            "hold must be binary".into(),
        ));
    }
    let mut replayed: BTreeMap<Vec<Atom>, bool> = BTreeMap::new();
    let mut candidates = 0;
    for depth in 0..=p.max_actions {
        let mut solver = Solver::new(&p.clause_set);
        let proofs = solver.prove(&p.goal, &Substitution::new(), depth, &mut Vec::new());
        for partial in proofs.into_iter().filter(|q| q.actions == depth) {
            let proof = partial.proofs.into_iter().next().expect("one proof per goal");
            debug_assert_eq!(proof.atom(), &p.goal);
            debug_assert_eq!(proof.action_count(), depth);
            candidates += 1;
            let mut graph = proof.into_graph();
            let orders = order::linearizations(&graph)?;
            for seq in orders {
                let ok = *replayed
                    .entry(seq.clone())
                    .or_insert_with(|| replay_actions(&p.clause_set, &p.goal, &seq).valid);
                if ok {
                    graph.action_order = seq;
                    return Ok(graph);
                }
            }
        }
    }
    Err(PlanError::NoPlan(NoPlan {
        goal: p.goal.clone(),
        max_actions: p.max_actions,
        candidates,
        rejected_sequences: replayed.values().filter(|ok| !**ok).count(),
    }))
}
