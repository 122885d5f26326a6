//! Abductive operation planning.
//!
//! [`abduce_plan`] chains backwards from a goal `hold` atom through
//! propagation rules and action rules, assuming action atoms, and returns
//! the justification as a [`PlanGraph`]. Plans are checked by forward
//! replay ([`validate_plan`]) before they are returned.

mod abduce;
mod dot;
mod order;
mod replay;

use std::fmt;

use thiserror::Error;

use crate::fol::{Atom, Substitution};
use crate::translate::ClauseSet;

pub use abduce::{abduce_plan, NoPlan};
pub use order::{extract_action_sequence, linearizations};
pub use replay::{
    replay_actions, validate_plan, Diagnostic, ReplayError, SimState, Simulator, ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("invalid planning problem: {0}")]
    InvalidProblem(String),
    #[error("malformed clause set: {0}")]
    MalformedClauseSet(String),
    #[error("{0}")]
    NoPlan(NoPlan),
    #[error("plan graph contains a cycle through node {0}")]
    CycleDetected(usize),
}

/// A clause set, a ground `hold` goal and an action budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanProblem {
    pub clause_set: ClauseSet,
    pub goal: Atom,
    pub max_actions: usize,
}

impl PlanProblem {
    pub fn new(clause_set: ClauseSet, goal: Atom, max_actions: usize) -> Result<Self, PlanError> {
        if goal.as_ground_hold().is_none() {
            return Err(PlanError::InvalidProblem(format!(
                "goal `{goal}` must be a ground hold atom"
            )));
        }
        if max_actions == 0 {
            return Err(PlanError::InvalidProblem("max_actions must be at least 1".into()));
        }
        Ok(PlanProblem {
            clause_set,
            goal,
            max_actions,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Goal,
    Fact,
    Action,
    Subgoal,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Goal => "goal",
            NodeKind::Fact => "fact",
            NodeKind::Action => "action",
            NodeKind::Subgoal => "subgoal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    pub atom: Atom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Justification {
    /// The conclusion already holds in the initial facts.
    Initial,
    Propagation,
    Action,
}

/// One implication instance: premises jointly yield the conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperEdge {
    pub justification: Justification,
    /// Rule or action name; `initial` for [`Justification::Initial`].
    pub rule: String,
    /// Bindings for the rule's own variables.
    pub substitution: Substitution,
    pub premises: Vec<usize>,
    pub conclusion: usize,
}

/// Justification DAG plus an executable ordering of its action nodes.
///
/// Node ids are assigned in depth-first pre-order from the goal (id 0),
/// premises left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanGraph {
    pub nodes: Vec<Node>,
    pub hyperedges: Vec<HyperEdge>,
    pub action_order: Vec<Atom>,
}

impl PlanGraph {
    pub fn goal(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn action_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Action)
    }

    pub fn action_count(&self) -> usize {
        self.action_nodes().count()
    }

    /// The hyperedge concluding `id`, if any.
    pub fn justification_of(&self, id: usize) -> Option<&HyperEdge> {
        self.hyperedges.iter().find(|h| h.conclusion == id)
    }

    pub fn to_dot(&self) -> String {
        dot::to_dot(self)
    }
}

/// A proof found by backward chaining, before node numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Proof {
    Fact(Atom),
    Action(Atom),
    Rule {
        justification: Justification,
        rule: String,
        substitution: Substitution,
        conclusion: Atom,
        premises: Vec<Proof>,
    },
}

impl Proof {
    pub(crate) fn action_count(&self) -> usize {
        match self {
            Proof::Fact(_) => 0,
            Proof::Action(_) => 1,
            Proof::Rule { premises, .. } => premises.iter().map(Proof::action_count).sum(),
        }
    }

    pub(crate) fn atom(&self) -> &Atom {
        match self {
            Proof::Fact(a) | Proof::Action(a) => a,
            Proof::Rule { conclusion, .. } => conclusion,
        }
    }

    /// Number nodes in pre-order; the root becomes the goal node.
    pub(crate) fn into_graph(self) -> PlanGraph {
        let mut g = PlanGraph {
            nodes: Vec::new(),
            hyperedges: Vec::new(),
            action_order: Vec::new(),
        };
        match self {
            Proof::Fact(a) => {
                g.nodes.push(Node {
                    id: 0,
                    kind: NodeKind::Goal,
                    atom: a.clone(),
                });
                g.nodes.push(Node {
                    id: 1,
                    kind: NodeKind::Fact,
                    atom: a,
                });
                g.hyperedges.push(HyperEdge {
                    justification: Justification::Initial,
                    rule: "initial".into(),
                    substitution: Substitution::new(),
                    premises: vec![1],
                    conclusion: 0,
                });
            }
            other => {
                number(other, true, &mut g);
            }
        }
        g
    }
}

fn number(p: Proof, root: bool, g: &mut PlanGraph) -> usize {
    let id = g.nodes.len();
    match p {
        Proof::Fact(a) => g.nodes.push(Node {
            id,
            kind: NodeKind::Fact,
            atom: a,
        }),
        Proof::Action(a) => g.nodes.push(Node {
            id,
            kind: NodeKind::Action,
            atom: a,
        }),
        Proof::Rule {
            justification,
            rule,
            substitution,
            conclusion,
            premises,
        } => {
            g.nodes.push(Node {
                id,
                kind: if root { NodeKind::Goal } else { NodeKind::Subgoal },
                atom: conclusion,
            });
            let premises = premises.into_iter().map(|q| number(q, false, g)).collect();
            g.hyperedges.push(HyperEdge {
                justification,
                rule,
                substitution,
                premises,
                conclusion: id,
            });
        }
    }
    id
}
