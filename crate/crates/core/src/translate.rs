//! Compilation of MFM models, propagation rules and actions into ground
//! facts and Horn clauses.
//!
//! A vertex `V` labelled `f` with state `S` becomes `f(V)` and `hold(V,S)`;
//! an edge `V1 → V2` labelled `r` becomes `r(V1,V2)`, plus `flow(V1,V2)`
//! when it carries flow. Rule patterns translate the same way with
//! variables for vertex names, and a rule with pattern `P`, cause
//! `(x, S1)` and effect `(y, S2)` becomes `T(P) ∧ hold(x,S1) ⇒ hold(y,S2)`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dsl::{ActionSource, RuleSource};
use crate::fol::{is_lower_name, Atom, FolError, HornRule, Signature, Term, FLOW, HOLD};
use crate::model::{Edge, MfmModel, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("fact `{0}` is not ground")]
    NonGroundFact(Atom),
    #[error("vertex `{vertex}` would hold both {first} and {second}")]
    StateExclusivity {
        vertex: String,
        first: String,
        second: String,
    },
    #[error("pattern vertex `{vertex}` carries state {state}; patterns are stateless")]
    StatefulPattern { vertex: String, state: String },
    #[error("pattern vertex `{0}` must be a lower-case variable name")]
    PatternVertexName(String),
    #[error("model vertex `{0}` must be a capitalised constant name")]
    ModelVertexName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseSetError {
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error("predicate `{predicate}` used with arity {found} in `{clause}`, but arity {expected} elsewhere")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
        clause: String,
    },
    #[error("action `{0}` is defined more than once")]
    DuplicateAction(String),
    #[error("action predicate `{0}` clashes with a structural or state predicate")]
    ActionPredicateClash(String),
    #[error("action rule `{0}` must have the action atom as its first antecedent")]
    MissingActionAtom(String),
}

/// Ground atoms for plant structure and current states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    atoms: BTreeSet<Atom>,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Result<Self, TranslateError> {
        let mut fb = FactBase::new();
        for a in atoms {
            fb.insert(a)?;
        }
        Ok(fb)
    }

    /// Insert a ground atom, keeping at most one `hold` per vertex.
    pub fn insert(&mut self, atom: Atom) -> Result<bool, TranslateError> {
        if !atom.is_ground() {
            return Err(TranslateError::NonGroundFact(atom));
        }
        if let Some((v, s)) = atom.as_ground_hold() {
            if let Some(prev) = self.state_of(v) {
                if prev != s {
                    return Err(TranslateError::StateExclusivity {
                        vertex: v.to_string(),
                        first: prev.to_string(),
                        second: s.to_string(),
                    });
                }
            }
        }
        Ok(self.atoms.insert(atom))
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    /// Function, relation and flow atoms.
    pub fn structure(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| !a.is_hold())
    }

    /// `hold` atoms.
    pub fn states(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.is_hold())
    }

    pub fn state_of(&self, vertex: &str) -> Option<&str> {
        self.states()
            .filter_map(Atom::as_ground_hold)
            .find(|(v, _)| *v == vertex)
            .map(|(_, s)| s)
    }

    /// Vertex → state map of the `hold` atoms.
    pub fn state_map(&self) -> BTreeMap<String, String> {
        self.states()
            .filter_map(Atom::as_ground_hold)
            .map(|(v, s)| (v.to_string(), s.to_string()))
            .collect()
    }

    /// Every constant occurring in some fact.
    pub fn constants(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter().filter_map(Term::as_constant))
            .collect()
    }
}

impl FromIterator<Atom> for FactBase {
    /// Collects without checks; panics on a non-ground or conflicting atom.
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        FactBase::from_atoms(iter).expect("invalid fact")
    }
}

fn vertex_atoms(v: &Vertex, term: Term) -> Vec<Atom> {
    let mut out = vec![Atom {
        predicate: v.function.to_string(),
        args: vec![term.clone()],
    }];
    if let Some(s) = &v.state {
        out.push(Atom {
            predicate: HOLD.to_string(),
            args: vec![term, Term::Constant(s.to_string())],
        });
    }
    out
}

fn edge_atoms(e: &Edge, from: Term, to: Term) -> Vec<Atom> {
    let mut out = Vec::with_capacity(2);
    if e.carries_flow {
        out.push(Atom {
            predicate: FLOW.to_string(),
            args: vec![from.clone(), to.clone()],
        });
    }
    out.push(Atom {
        predicate: e.relation.to_string(),
        args: vec![from, to],
    });
    out
}

pub fn translate_vertex(v: &Vertex) -> BTreeSet<Atom> {
    vertex_atoms(v, Term::Constant(v.name.clone()))
        .into_iter()
        .collect()
}

pub fn translate_edge(e: &Edge) -> BTreeSet<Atom> {
    edge_atoms(
        e,
        Term::Constant(e.from.clone()),
        Term::Constant(e.to.clone()),
    )
    .into_iter()
    .collect()
}

/// Translate a plant model. The model is expected to pass
/// [`MfmModel::validate`].
pub fn translate_model(m: &MfmModel) -> Result<FactBase, TranslateError> {
    let mut fb = FactBase::new();
    for v in &m.vertices {
        if !crate::fol::is_constant_name(&v.name) {
            return Err(TranslateError::ModelVertexName(v.name.clone()));
        }
        for a in translate_vertex(v) {
            fb.insert(a)?;
        }
    }
    for e in &m.edges {
        for a in translate_edge(e) {
            fb.insert(a)?;
        }
    }
    Ok(fb)
}

/// `T(P)`: function atoms in vertex order, then each edge's flow and
/// relation atoms, over variables.
pub fn translate_pattern(p: &MfmModel) -> Result<Vec<Atom>, TranslateError> {
    let mut out = Vec::new();
    for v in &p.vertices {
        if let Some(s) = &v.state {
            return Err(TranslateError::StatefulPattern {
                vertex: v.name.clone(),
                state: s.to_string(),
            });
        }
        if !is_lower_name(&v.name) {
            return Err(TranslateError::PatternVertexName(v.name.clone()));
        }
        out.extend(vertex_atoms(v, Term::Variable(v.name.clone())));
    }
    for e in &p.edges {
        out.extend(edge_atoms(
            e,
            Term::Variable(e.from.clone()),
            Term::Variable(e.to.clone()),
        ));
    }
    Ok(out)
}

/// One Horn rule per effect. A rule with several effects yields clauses
/// named `<name>_1`, `<name>_2`, ….
pub fn translate_rule(r: &RuleSource) -> Result<Vec<HornRule>, TranslateError> {
    let pattern = translate_pattern(&r.pattern)?;
    let mut body = pattern;
    body.push(r.cause.to_atom());
    let many = r.effects.len() > 1;
    Ok(r
        .effects
        .iter()
        .enumerate()
        .map(|(i, eff)| HornRule {
            name: if many {
                format!("{}_{}", r.name, i + 1)
            } else {
                r.name.clone()
            },
            antecedents: body.clone(),
            consequent: eff.to_atom(),
        })
        .collect())
}

/// An action as an implication whose first antecedent is the abducible
/// action atom: `act(v) ∧ pre… ⇒ effect`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ActionRule {
    pub action: Atom,
    pub rule: HornRule,
}

impl ActionRule {
    pub fn name(&self) -> &str {
        &self.action.predicate
    }

    pub fn preconditions(&self) -> &[Atom] {
        &self.rule.antecedents[1..]
    }

    pub fn effect(&self) -> &Atom {
        &self.rule.consequent
    }
}

pub fn translate_action(a: &ActionSource) -> ActionRule {
    let action = Atom {
        predicate: a.action_name.clone(),
        args: a.params.iter().map(|p| Term::Variable(p.clone())).collect(),
    };
    let mut antecedents = vec![action.clone()];
    antecedents.extend(a.preconditions.iter().cloned());
    ActionRule {
        action,
        rule: HornRule {
            name: a.action_name.clone(),
            antecedents,
            consequent: a.effect.clone(),
        },
    }
}

/// Facts plus propagation and action rules, checked for range
/// restriction and a consistent predicate signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    facts: FactBase,
    propagation_rules: Vec<HornRule>,
    action_rules: Vec<ActionRule>,
    signature: Signature,
}

impl ClauseSet {
    pub fn new(
        facts: FactBase,
        propagation_rules: Vec<HornRule>,
        action_rules: Vec<ActionRule>,
    ) -> Result<Self, ClauseSetError> {
        let mut signature = Signature::new();
        let mut observe = |atom: &Atom, clause: &dyn std::fmt::Display| {
            signature
                .observe(atom)
                .map_err(|expected| ClauseSetError::ArityMismatch {
                    predicate: atom.predicate.clone(),
                    expected,
                    found: atom.arity(),
                    clause: clause.to_string(),
                })
        };
        for a in facts.iter() {
            observe(a, a)?;
        }
        for r in &propagation_rules {
            r.check_range_restricted()?;
            for a in r.antecedents.iter().chain(std::iter::once(&r.consequent)) {
                observe(a, r)?;
            }
        }
        let mut names = BTreeSet::new();
        for ar in &action_rules {
            ar.rule.check_range_restricted()?;
            if ar.rule.antecedents.first() != Some(&ar.action) {
                return Err(ClauseSetError::MissingActionAtom(ar.rule.name.clone()));
            }
            if !names.insert(ar.action.predicate.clone()) {
                return Err(ClauseSetError::DuplicateAction(ar.action.predicate.clone()));
            }
            for a in ar.rule.antecedents.iter().chain(std::iter::once(&ar.rule.consequent)) {
                observe(a, &ar.rule)?;
            }
        }
        let structural: BTreeSet<&str> = facts
            .iter()
            .map(|a| a.predicate.as_str())
            .chain(propagation_rules.iter().flat_map(|r| {
                r.antecedents
                    .iter()
                    .chain(std::iter::once(&r.consequent))
                    .map(|a| a.predicate.as_str())
            }))
            .chain([HOLD, FLOW])
            .collect();
        if let Some(clash) = names.iter().find(|n| structural.contains(n.as_str())) {
            return Err(ClauseSetError::ActionPredicateClash(clash.clone()));
        }
        Ok(ClauseSet {
            facts,
            propagation_rules,
            action_rules,
            signature,
        })
    }

    /// Translate a model, its propagation rules and its actions together.
    pub fn compile(
        model: &MfmModel,
        rules: &[RuleSource],
        actions: &[ActionSource],
    ) -> Result<Self, CompileError> {
        let facts = translate_model(model)?;
        let mut prop = Vec::new();
        for r in rules {
            prop.extend(translate_rule(r)?);
        }
        let acts = actions.iter().map(translate_action).collect();
        Ok(ClauseSet::new(facts, prop, acts)?)
    }

    pub fn facts(&self) -> &FactBase {
        &self.facts
    }

    pub fn propagation_rules(&self) -> &[HornRule] {
        &self.propagation_rules
    }

    pub fn action_rules(&self) -> &[ActionRule] {
        &self.action_rules
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn action_rule(&self, predicate: &str) -> Option<&ActionRule> {
        self.action_rules
            .iter()
            .find(|a| a.action.predicate == predicate)
    }

    /// Same clauses with a different initial fact base.
    pub fn with_facts(&self, facts: FactBase) -> Result<Self, ClauseSetError> {
        ClauseSet::new(
            facts,
            self.propagation_rules.clone(),
            self.action_rules.clone(),
        )
    }

    /// Prolog-style listing, one clause per line in byte order:
    /// `atom.` for facts, `head :- a1, a2.` for rules and
    /// `abducible act(v).` for action atoms.
    pub fn emit_clauses(&self) -> String {
        let mut lines: Vec<String> = self.facts.iter().map(|a| format!("{a}.")).collect();
        lines.extend(self.propagation_rules.iter().map(|r| format!("{r}.")));
        for ar in &self.action_rules {
            lines.push(format!("{}.", ar.rule));
            lines.push(format!("abducible {}.", ar.action));
        }
        lines.sort();
        lines.dedup();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    ClauseSet(#[from] ClauseSetError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::HoldSpec;
    use crate::model::StateLabel;

    fn atoms(texts: &[&str]) -> BTreeSet<Atom> {
        texts.iter().map(|t| Atom::parse(t).unwrap()).collect()
    }

    fn toy(state: &str) -> MfmModel {
        let mut m = MfmModel::new("ToyPlant");
        m.add_vertex(Vertex::new("Faucet1", "source", Some(state)).unwrap())
            .unwrap()
            .add_vertex(Vertex::new("Pipe1", "transport", Some(state)).unwrap())
            .unwrap()
            .add_edge(Edge::new("Faucet1", "Pipe1", "influencer", true).unwrap())
            .unwrap();
        m
    }

    fn st_pattern() -> MfmModel {
        let mut p = MfmModel::new("p");
        p.add_vertex(Vertex::new("x", "source", None).unwrap())
            .unwrap()
            .add_vertex(Vertex::new("y", "transport", None).unwrap())
            .unwrap()
            .add_edge(Edge::new("x", "y", "influencer", true).unwrap())
            .unwrap();
        p
    }

    fn hs(v: &str, s: &str) -> HoldSpec {
        HoldSpec {
            vertex: v.into(),
            state: StateLabel::new(s).unwrap(),
        }
    }

    #[test]
    fn translate_vertex_examples() {
        let v = Vertex::new("Faucet1", "source", Some("No")).unwrap();
        assert_eq!(translate_vertex(&v), atoms(&["source(Faucet1)", "hold(Faucet1,No)"]));
        let v = Vertex::new("Pipe1", "transport", None).unwrap();
        assert_eq!(translate_vertex(&v), atoms(&["transport(Pipe1)"]));
        let v = Vertex::new("Tank1", "storage", Some("High")).unwrap();
        assert_eq!(translate_vertex(&v), atoms(&["storage(Tank1)", "hold(Tank1,High)"]));
    }

    #[test]
    fn translate_edge_examples() {
        let e = Edge::new("Faucet1", "Pipe1", "influencer", true).unwrap();
        assert_eq!(
            translate_edge(&e),
            atoms(&["influencer(Faucet1,Pipe1)", "flow(Faucet1,Pipe1)"])
        );
        let e = Edge::new("A", "B", "participant", false).unwrap();
        assert_eq!(translate_edge(&e), atoms(&["participant(A,B)"]));
    }

    #[test]
    fn translate_model_examples() {
        let fb = translate_model(&toy("No")).unwrap();
        assert_eq!(
            fb.atoms(),
            &atoms(&[
                "source(Faucet1)",
                "transport(Pipe1)",
                "influencer(Faucet1,Pipe1)",
                "flow(Faucet1,Pipe1)",
                "hold(Faucet1,No)",
                "hold(Pipe1,No)"
            ])
        );
        assert!(translate_model(&MfmModel::new("E")).unwrap().is_empty());

        let mut m = toy("No");
        m.add_edge(Edge::new("Faucet1", "Pipe1", "participant", false).unwrap())
            .unwrap();
        let fb = translate_model(&m).unwrap();
        assert!(fb.contains(&Atom::parse("participant(Faucet1,Pipe1)").unwrap()));
        assert_eq!(fb.structure().count(), 5);
        assert_eq!(fb.states().count(), 2);
    }

    #[test]
    fn fact_base_rejects_conflicting_states() {
        let mut fb = FactBase::new();
        fb.insert(Atom::hold("A", "High")).unwrap();
        assert!(matches!(
            fb.insert(Atom::hold("A", "Low")),
            Err(TranslateError::StateExclusivity { .. })
        ));
        assert!(matches!(
            fb.insert(Atom::parse("hold(x,Low)").unwrap()),
            Err(TranslateError::NonGroundFact(_))
        ));
    }

    #[test]
    fn translate_pattern_examples() {
        let t = translate_pattern(&st_pattern()).unwrap();
        let expected: Vec<Atom> = ["source(x)", "transport(y)", "flow(x,y)", "influencer(x,y)"]
            .iter()
            .map(|t| Atom::parse(t).unwrap())
            .collect();
        assert_eq!(t, expected);

        let mut single = MfmModel::new("s");
        single
            .add_vertex(Vertex::new("x", "source", None).unwrap())
            .unwrap();
        assert_eq!(translate_pattern(&single).unwrap(), vec![Atom::parse("source(x)").unwrap()]);

        let mut stateful = st_pattern();
        stateful.vertices[0].state = Some(StateLabel::new("High").unwrap());
        assert!(matches!(
            translate_pattern(&stateful),
            Err(TranslateError::StatefulPattern { .. })
        ));
    }

    #[test]
    fn translate_rule_examples() {
        let r = RuleSource {
            name: "high".into(),
            pattern: st_pattern(),
            cause: hs("x", "High"),
            effects: vec![hs("y", "High")],
        };
        let clauses = translate_rule(&r).unwrap();
        assert_eq!(clauses.len(), 1);
        assert_eq!(
            clauses[0].to_string(),
            "hold(y,High) :- source(x), transport(y), flow(x,y), influencer(x,y), hold(x,High)"
        );

        let two = RuleSource {
            effects: vec![hs("y", "High"), hs("x", "Low")],
            ..r.clone()
        };
        let clauses = translate_rule(&two).unwrap();
        assert_eq!(clauses.len(), 2);
        assert_eq!(clauses[0].antecedents, clauses[1].antecedents);
        assert_eq!(clauses[1].name, "high_2");
    }

    #[test]
    fn translate_action_examples() {
        let open = ActionSource {
            action_name: "open".into(),
            params: vec!["v".into()],
            preconditions: vec![Atom::parse("hold(v,No)").unwrap()],
            effect: Atom::parse("hold(v,High)").unwrap(),
        };
        let ar = translate_action(&open);
        assert_eq!(ar.rule.to_string(), "hold(v,High) :- open(v), hold(v,No)");
        assert_eq!(ar.preconditions().len(), 1);

        let bare = ActionSource {
            preconditions: vec![],
            ..open
        };
        let ar = translate_action(&bare);
        assert_eq!(ar.rule.antecedents, vec![ar.action.clone()]);
    }

    #[test]
    fn clause_set_checks_signature_and_actions() {
        let facts = translate_model(&toy("No")).unwrap();
        let bad = HornRule::new(
            "bad",
            vec![Atom::parse("hold(x)").unwrap()],
            Atom::parse("hold(x,High)").unwrap(),
        )
        .unwrap();
        assert!(matches!(
            ClauseSet::new(facts.clone(), vec![bad], vec![]),
            Err(ClauseSetError::ArityMismatch { .. })
        ));

        let open = translate_action(&ActionSource {
            action_name: "open".into(),
            params: vec!["v".into()],
            preconditions: vec![],
            effect: Atom::parse("hold(v,High)").unwrap(),
        });
        assert!(matches!(
            ClauseSet::new(facts.clone(), vec![], vec![open.clone(), open.clone()]),
            Err(ClauseSetError::DuplicateAction(_))
        ));
        let mut clash = open.clone();
        clash.action.predicate = "source".into();
        clash.rule.antecedents[0].predicate = "source".into();
        assert!(matches!(
            ClauseSet::new(facts, vec![], vec![clash]),
            Err(ClauseSetError::ActionPredicateClash(_))
        ));
    }

    #[test]
    fn emitted_clauses_are_sorted() {
        let r = RuleSource {
            name: "high".into(),
            pattern: st_pattern(),
            cause: hs("x", "High"),
            effects: vec![hs("y", "High")],
        };
        let open = ActionSource {
            action_name: "open".into(),
            params: vec!["v".into()],
            preconditions: vec![Atom::parse("hold(v,No)").unwrap()],
            effect: Atom::parse("hold(v,High)").unwrap(),
        };
        let cs = ClauseSet::compile(&toy("No"), &[r], &[open]).unwrap();
        let text = cs.emit_clauses();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec![
                "abducible open(v).",
                "flow(Faucet1,Pipe1).",
                "hold(Faucet1,No).",
                "hold(Pipe1,No).",
                "hold(v,High) :- open(v), hold(v,No).",
                "hold(y,High) :- source(x), transport(y), flow(x,y), influencer(x,y), hold(x,High).",
                "influencer(Faucet1,Pipe1).",
                "source(Faucet1).",
                "transport(Pipe1).",
            ]
        );
    }
}
