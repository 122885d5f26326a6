//! Forward replay of an action sequence.
//!
//! The simulated plant state has two layers. The *base* layer holds each
//! vertex's assigned state: its initial state, replaced by the effect of
//! every action on it. The *view* layer is what holds: after each action,
//! every propagation-driven vertex is recomputed from its upstream
//! vertices in topological order of the influence structure, and a
//! derived state replaces the vertex's base state. A vertex that no
//! matching rule instance derives anything for keeps its base state. Two
//! distinct derived states for one vertex make the replay fail.
//!
//! An atom holds in a state iff it is entailed by the plant structure,
//! the view and the propagation rules. Before the first action the view
//! is the initial fact base as given.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{NodeKind, PlanGraph, PlanProblem};
use crate::fol::{unify, unify_with, Atom, HornRule, Substitution, Term, HOLD};
use crate::propagate::{entails, match_body, Index};
use crate::translate::{ClauseSet, FactBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("`{0}` is not an instance of any declared action")]
    UnknownAction(Atom),
    #[error("precondition {precondition} of {action} does not hold")]
    PreconditionFailed { action: Atom, precondition: Atom },
    #[error("vertex `{vertex}` is driven to both {first} and {second}")]
    Conflict {
        vertex: String,
        first: String,
        second: String,
    },
    #[error("influence structure is cyclic through `{0}`; replay needs an acyclic structure")]
    CyclicInfluence(String),
    #[error("rule `{rule}` cannot be replayed: {reason}")]
    UnsupportedRule { rule: String, reason: String },
}

/// A replay state. `view` is what holds; `base` carries assigned states
/// forward.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimState {
    pub base: BTreeMap<String, String>,
    pub view: BTreeMap<String, String>,
}

impl SimState {
    pub fn hold_atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.view.iter().map(|(v, s)| Atom::hold(v, s))
    }
}

#[derive(Debug, Clone)]
struct DriveInstance {
    rule: usize,
    subst: Substitution,
    /// `hold` antecedents after structural matching; vertex args ground.
    holds: Vec<Atom>,
    consequent: Atom,
}

#[derive(Debug, Clone)]
struct Drive {
    /// Driven vertices in evaluation order.
    order: Vec<String>,
    instances: BTreeMap<String, Vec<DriveInstance>>,
}

/// Replay engine over one clause set.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    clauses: &'a ClauseSet,
    structure: FactBase,
    drive: Result<Drive, ReplayError>,
}

impl<'a> Simulator<'a> {
    pub fn new(clauses: &'a ClauseSet) -> Self {
        let structure: FactBase = clauses.facts().structure().cloned().collect();
        let drive = build_drive(&structure, clauses.propagation_rules());
        Simulator {
            clauses,
            structure,
            drive,
        }
    }

    pub fn initial(&self) -> SimState {
        let base = self.clauses.facts().state_map();
        SimState {
            view: base.clone(),
            base,
        }
    }

    /// Does `atom` hold in `state`?
    pub fn holds(&self, state: &SimState, atom: &Atom) -> bool {
        let mut facts = self.structure.clone();
        for a in state.hold_atoms() {
            facts.insert(a).expect("view holds one state per vertex");
        }
        entails(&facts, self.clauses.propagation_rules(), atom)
    }

    /// Fire a ground action atom.
    pub fn step(&self, state: &SimState, action: &Atom) -> Result<SimState, ReplayError> {
        let ar = self
            .clauses
            .action_rule(&action.predicate)
            .filter(|_| action.is_ground())
            .ok_or_else(|| ReplayError::UnknownAction(action.clone()))?;
        let s = unify(&ar.action, action).ok_or_else(|| ReplayError::UnknownAction(action.clone()))?;
        for pre in ar.preconditions() {
            let pre = pre.apply(&s);
            if !pre.is_ground() || !self.holds(state, &pre) {
                return Err(ReplayError::PreconditionFailed {
                    action: action.clone(),
                    precondition: pre,
                });
            }
        }
        let effect = ar.effect().apply(&s);
        let (v, st) = effect.as_ground_hold().ok_or_else(|| ReplayError::UnsupportedRule {
            rule: ar.rule.name.clone(),
            reason: format!("effect `{effect}` is not a ground hold atom"),
        })?;
        let mut base = state.base.clone();
        base.insert(v.to_string(), st.to_string());
        let view = self.settle(&base)?;
        Ok(SimState { base, view })
    }

    fn settle(&self, base: &BTreeMap<String, String>) -> Result<BTreeMap<String, String>, ReplayError> {
        let drive = self.drive.as_ref().map_err(Clone::clone)?;
        let mut view = base.clone();
        for vertex in &drive.order {
            let mut derived: BTreeSet<String> = BTreeSet::new();
            for inst in &drive.instances[vertex] {
                let mut matches = vec![inst.subst.clone()];
                for h in &inst.holds {
                    matches = matches
                        .into_iter()
                        .filter_map(|s| {
                            let h = h.apply(&s);
                            let u = h.args[0].as_constant()?;
                            let current = Atom::hold(u, view.get(u)?);
                            unify_with(&h, &current, &s)
                        })
                        .collect();
                }
                for s in matches {
                    let c = inst.consequent.apply(&s);
                    match c.args[1].as_constant() {
                        Some(st) => {
                            derived.insert(st.to_string());
                        }
                        None => {
                            return Err(ReplayError::UnsupportedRule {
                                rule: self.clauses.propagation_rules()[inst.rule].name.clone(),
                                reason: format!("derived state in `{c}` is not ground"),
                            })
                        }
                    }
                }
            }
            let mut it = derived.into_iter();
            match (it.next(), it.next()) {
                (Some(first), Some(second)) => {
                    return Err(ReplayError::Conflict {
                        vertex: vertex.clone(),
                        first,
                        second,
                    })
                }
                (Some(s), None) => {
                    view.insert(vertex.clone(), s);
                }
                _ => {}
            }
        }
        Ok(view)
    }
}

fn build_drive(structure: &FactBase, rules: &[HornRule]) -> Result<Drive, ReplayError> {
    let index = Index::new(structure.iter());
    let mut instances: BTreeMap<String, Vec<DriveInstance>> = BTreeMap::new();
    let mut upstream: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, rule) in rules.iter().enumerate() {
        let unsupported = |reason: String| ReplayError::UnsupportedRule {
            rule: rule.name.clone(),
            reason,
        };
        if !rule.consequent.is_hold() {
            return Err(unsupported(format!("consequent `{}` is not a hold atom", rule.consequent)));
        }
        let (holds, body): (Vec<Atom>, Vec<Atom>) =
            rule.antecedents.iter().cloned().partition(|a| a.predicate == HOLD);
        let mut found = Vec::new();
        match_body(&body, &index, &Substitution::new(), &mut Vec::new(), &mut |s, _| {
            found.push(s.clone())
        });
        for s in found {
            let holds: Vec<Atom> = holds.iter().map(|h| h.apply(&s)).collect();
            let consequent = rule.consequent.apply(&s);
            let Some(target) = consequent.args[0].as_constant().map(str::to_string) else {
                return Err(unsupported(format!(
                    "consequent vertex of `{consequent}` is not fixed by the plant structure"
                )));
            };
            let ups = upstream.entry(target.clone()).or_default();
            for h in &holds {
                match &h.args.first() {
                    Some(Term::Constant(u)) if h.args.len() == 2 => {
                        ups.insert(u.clone());
                    }
                    _ => {
                        return Err(unsupported(format!(
                            "vertex of antecedent `{h}` is not fixed by the plant structure"
                        )))
                    }
                }
            }
            instances.entry(target).or_default().push(DriveInstance {
                rule: i,
                subst: s,
                holds,
                consequent,
            });
        }
    }
    Ok(Drive {
        order: topological(&upstream)?,
        instances,
    })
}

/// Kahn's algorithm over driven vertices, smallest name first.
fn topological(upstream: &BTreeMap<String, BTreeSet<String>>) -> Result<Vec<String>, ReplayError> {
    let mut pending: BTreeMap<&str, BTreeSet<&str>> = upstream
        .iter()
        .map(|(v, ups)| {
            (
                v.as_str(),
                ups.iter()
                    .map(String::as_str)
                    .filter(|u| upstream.contains_key(*u))
                    .collect(),
            )
        })
        .collect();
    let mut order = Vec::new();
    while !pending.is_empty() {
        let Some(next) = pending.iter().find(|(_, ups)| ups.is_empty()).map(|(v, _)| *v) else {
            let stuck = pending.keys().next().expect("nonempty");
            return Err(ReplayError::CyclicInfluence(stuck.to_string()));
        };
        pending.remove(next);
        for ups in pending.values_mut() {
            ups.remove(next);
        }
        order.push(next.to_string());
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Structure(String),
    Replay { step: usize, error: ReplayError },
    GoalNotReached(Atom),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Structure(msg) => write!(f, "structure: {msg}"),
            Diagnostic::Replay { step, error } => write!(f, "step {}: {error}", step + 1),
            Diagnostic::GoalNotReached(goal) => write!(f, "goal {goal} does not hold after the last action"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub diagnostics: Vec<Diagnostic>,
    /// View after the last successfully replayed action.
    pub final_state: BTreeMap<String, String>,
}

/// Replay `actions` from the initial facts and check the goal.
pub fn replay_actions(clauses: &ClauseSet, goal: &Atom, actions: &[Atom]) -> ValidationReport {
    let sim = Simulator::new(clauses);
    let mut state = sim.initial();
    for (step, a) in actions.iter().enumerate() {
        match sim.step(&state, a) {
            Ok(next) => state = next,
            Err(error) => {
                return ValidationReport {
                    valid: false,
                    diagnostics: vec![Diagnostic::Replay { step, error }],
                    final_state: state.view,
                }
            }
        }
    }
    let reached = sim.holds(&state, goal);
    ValidationReport {
        valid: reached,
        diagnostics: if reached {
            vec![]
        } else {
            vec![Diagnostic::GoalNotReached(goal.clone())]
        },
        final_state: state.view,
    }
}

/// Structural well-formedness of `g` against `p`, then replay of
/// `g.action_order`.
pub fn validate_plan(p: &PlanProblem, g: &PlanGraph) -> ValidationReport {
    let problems = structural_problems(p, g);
    if !problems.is_empty() {
        return ValidationReport {
            valid: false,
            diagnostics: problems.into_iter().map(Diagnostic::Structure).collect(),
            final_state: Simulator::new(&p.clause_set).initial().view,
        };
    }
    replay_actions(&p.clause_set, &p.goal, &g.action_order)
}

fn structural_problems(p: &PlanProblem, g: &PlanGraph) -> Vec<String> {
    let mut out = Vec::new();
    if g.nodes.is_empty() {
        return vec!["graph has no nodes".into()];
    }
    for (i, n) in g.nodes.iter().enumerate() {
        if n.id != i {
            out.push(format!("node at position {i} has id {}", n.id));
        }
    }
    let goals: Vec<&super::Node> = g.nodes.iter().filter(|n| n.kind == NodeKind::Goal).collect();
    match goals.as_slice() {
        [goal] if goal.atom == p.goal => {}
        [goal] => out.push(format!("goal node holds {} instead of {}", goal.atom, p.goal)),
        _ => out.push(format!("expected one goal node, found {}", goals.len())),
    }
    let n = g.nodes.len();
    let mut concluded = vec![0usize; n];
    for h in &g.hyperedges {
        if h.conclusion >= n || h.premises.iter().any(|&q| q >= n) {
            out.push(format!("hyperedge `{}` refers to a missing node", h.rule));
            continue;
        }
        concluded[h.conclusion] += 1;
        if let Some(msg) = instance_problem(&p.clause_set, g, h) {
            out.push(msg);
        }
    }
    if !out.is_empty() {
        return out;
    }
    for node in &g.nodes {
        let c = concluded[node.id];
        match node.kind {
            NodeKind::Goal | NodeKind::Subgoal if c != 1 => out.push(format!(
                "{} node {} ({}) is concluded by {c} hyperedges",
                node.kind, node.id, node.atom
            )),
            NodeKind::Fact | NodeKind::Action if c != 0 => out.push(format!(
                "{} node {} ({}) must not be concluded by a hyperedge",
                node.kind, node.id, node.atom
            )),
            _ => {}
        }
        if node.kind == NodeKind::Fact && !p.clause_set.facts().contains(&node.atom) {
            out.push(format!("fact node {} ({}) is not an initial fact", node.id, node.atom));
        }
    }
    if let Err(e) = super::order::check_acyclic(g) {
        out.push(e.to_string());
        return out;
    }
    match super::order::linearizations(g) {
        Ok(orders) => {
            if !orders.contains(&g.action_order) {
                out.push("action_order is not a topological order of the action nodes".into());
            }
        }
        Err(e) => out.push(e.to_string()),
    }
    out
}

fn instance_problem(clauses: &ClauseSet, g: &PlanGraph, h: &super::HyperEdge) -> Option<String> {
    use super::Justification;
    let premises: Vec<&Atom> = h.premises.iter().map(|&i| &g.nodes[i].atom).collect();
    let conclusion = &g.nodes[h.conclusion].atom;
    let rule: &HornRule = match h.justification {
        Justification::Initial => {
            return (premises != [conclusion])
                .then(|| format!("initial justification of {conclusion} must cite that same fact"));
        }
        Justification::Propagation => {
            match clauses.propagation_rules().iter().find(|r| r.name == h.rule) {
                Some(r) => r,
                None => return Some(format!("unknown propagation rule `{}`", h.rule)),
            }
        }
        Justification::Action => match clauses.action_rule(&h.rule) {
            Some(a) => {
                if h.premises.first().map(|&i| g.nodes[i].kind) != Some(NodeKind::Action) {
                    return Some(format!("action hyperedge `{}` lacks its action node", h.rule));
                }
                &a.rule
            }
            None => return Some(format!("unknown action `{}`", h.rule)),
        },
    };
    let inst = rule.apply(&h.substitution);
    let body: Vec<&Atom> = inst.antecedents.iter().collect();
    if body != premises || &inst.consequent != conclusion {
        return Some(format!(
            "hyperedge `{}` with {} is not an instance of its rule",
            h.rule, h.substitution
        ));
    }
    None
}
