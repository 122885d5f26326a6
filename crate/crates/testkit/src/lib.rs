//! Random problem corpora and brute-force oracles shared by the test
//! suites. Nothing here is used by the library itself.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use mfm_fol::dsl::{ActionSource, Document, HoldSpec, RuleSource};
use mfm_fol::fol::{Atom, HornRule, Substitution, Term};
use mfm_fol::model::{Edge, MfmModel, StateLabel, Vertex};
use mfm_fol::plan::{PlanProblem, SimState, Simulator};
use mfm_fol::translate::{translate_rule, ClauseSet, FactBase};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STATES: [&str; 3] = ["High", "Low", "No"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// A generated planning problem, kept as source structures so it can be
/// printed and reparsed.
#[derive(Debug, Clone)]
pub struct PlanCase {
    pub model: MfmModel,
    pub rules: Vec<RuleSource>,
    pub actions: Vec<ActionSource>,
    pub goal: Atom,
    pub max_actions: usize,
}

impl PlanCase {
    pub fn clause_set(&self) -> ClauseSet {
        ClauseSet::compile(&self.model, &self.rules, &self.actions).expect("generated case compiles")
    }

    pub fn problem(&self) -> PlanProblem {
        PlanProblem::new(self.clause_set(), self.goal.clone(), self.max_actions).expect("valid problem")
    }

    pub fn document(&self) -> Document {
        Document {
            models: vec![self.model.clone()],
            rules: self.rules.clone(),
            actions: self.actions.clone(),
            problems: Vec::new(),
        }
    }
}

fn hold_spec(vertex: &str, state: &str) -> HoldSpec {
    HoldSpec {
        vertex: vertex.into(),
        state: StateLabel::new(state).unwrap(),
    }
}

fn two_vertex_pattern(name: &str, fx: &str, fy: &str, relation: &str, flow: bool) -> MfmModel {
    let mut p = MfmModel::new(name);
    p.add_vertex(Vertex::new("x", fx, None).unwrap()).unwrap();
    p.add_vertex(Vertex::new("y", fy, None).unwrap()).unwrap();
    p.add_edge(Edge::new("x", "y", relation, flow).unwrap()).unwrap();
    p
}

/// A plant of two to four vertices shaped as a forest: every transport has
/// at most one upstream vertex, and vertex 0 is a source. Each of the two
/// patterns (source feeding transport, transport feeding transport) gets a
/// total state mapping, so every fed transport is driven by exactly one
/// rule instance. Actions act on one vertex, have at most one `hold`
/// precondition, and may be guarded by a function type. The initial state
/// is the settled one.
pub fn random_plan_case(rng: &mut impl Rng) -> PlanCase {
    let n = rng.gen_range(2..=4);
    let mut functions = vec!["source"];
    for _ in 1..n {
        functions.push(if rng.gen_bool(0.6) { "transport" } else { "source" });
    }
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for j in 1..n {
        if functions[j] == "transport" && rng.gen_bool(0.8) {
            parent[j] = Some(rng.gen_range(0..j));
        }
    }

    let mut maps: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    let mut rules = Vec::new();
    for from in ["source", "transport"] {
        let m = maps.entry(from).or_default();
        // A permutation keeps every state reachable downstream; otherwise
        // an arbitrary function.
        let mut image = STATES.to_vec();
        if rng.gen_bool(0.5) {
            image.shuffle(rng);
        } else {
            image = (0..3).map(|_| *STATES.choose(rng).unwrap()).collect();
        }
        for (s, t) in STATES.into_iter().zip(image) {
            m.insert(s, t);
            rules.push(RuleSource {
                name: format!("{from}_{}", s.to_lowercase()),
                pattern: two_vertex_pattern(&format!("{from}_{}", s.to_lowercase()), from, "transport", "influencer", true),
                cause: hold_spec("x", s),
                effects: vec![hold_spec("y", t)],
            });
        }
    }

    let mut states: Vec<&str> = Vec::with_capacity(n);
    for up in &parent {
        let s = match *up {
            Some(p) => maps[functions[p]][states[p]],
            None => *STATES.choose(rng).unwrap(),
        };
        states.push(s);
    }

    let mut model = MfmModel::new("Plant");
    for j in 0..n {
        model
            .add_vertex(Vertex::new(&names[j], functions[j], Some(states[j])).unwrap())
            .unwrap();
    }
    for j in 0..n {
        if let Some(p) = parent[j] {
            model
                .add_edge(Edge::new(&names[p], &names[j], "influencer", true).unwrap())
                .unwrap();
        }
    }

    let mut actions = Vec::new();
    let mut effects: Vec<&str> = Vec::new();
    for k in 0..rng.gen_range(2..=3) {
        let mut pre = Vec::new();
        match rng.gen_range(0..4) {
            0 => pre.push(Atom::parse("source(v)").unwrap()),
            1 => pre.push(Atom::parse("transport(v)").unwrap()),
            _ => {}
        }
        if rng.gen_bool(0.75) {
            // Half the time, chain onto the previous action's effect, or
            // for the first action onto the state of vertex 0.
            let s = match effects.last() {
                _ if rng.gen_bool(0.5) => *STATES.choose(rng).unwrap(),
                Some(prev) => *prev,
                None => states[0],
            };
            pre.push(Atom::parse(&format!("hold(v,{s})")).unwrap());
        }
        let effect = *STATES.choose(rng).unwrap();
        effects.push(effect);
        actions.push(ActionSource {
            action_name: format!("act{k}"),
            params: vec!["v".into()],
            preconditions: pre,
            effect: Atom::parse(&format!("hold(v,{effect})")).unwrap(),
        });
    }

    // Mostly ask for a state the vertex is not already in.
    let target = rng.gen_range(0..n);
    let state = if rng.gen_bool(0.8) {
        *STATES
            .iter()
            .filter(|s| **s != states[target])
            .collect::<Vec<_>>()
            .choose(rng)
            .unwrap()
    } else {
        states[target]
    };
    let goal = Atom::hold(&names[target], state);
    PlanCase {
        model,
        rules,
        actions,
        goal,
        max_actions: 4,
    }
}

/// Fewest actions reaching the goal, by breadth-first search over replay
/// states, or `None` within `budget`.
pub fn bfs_min_actions(clauses: &ClauseSet, goal: &Atom, budget: usize) -> Option<usize> {
    let sim = Simulator::new(clauses);
    let mut vertices: Vec<String> = clauses.facts().state_map().into_keys().collect();
    for a in clauses.facts().iter() {
        for t in &a.args {
            if let Term::Constant(c) = t {
                vertices.push(c.clone());
            }
        }
    }
    vertices.sort();
    vertices.dedup();
    let ground: Vec<Atom> = clauses
        .action_rules()
        .iter()
        .flat_map(|ar| arg_tuples(&vertices, ar.action.arity()).into_iter().map(|args| {
            Atom::new(&ar.action.predicate, args.into_iter().map(Term::Constant).collect())
                .expect("action predicate is valid")
        }))
        .collect();

    let start = sim.initial();
    let mut seen: BTreeSet<SimState> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        if sim.holds(&state, goal) {
            return Some(depth);
        }
        if depth == budget {
            continue;
        }
        for a in &ground {
            if let Ok(next) = sim.step(&state, a) {
                if seen.insert(next.clone()) {
                    queue.push_back((next, depth + 1));
                }
            }
        }
    }
    None
}

fn arg_tuples(constants: &[String], arity: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                constants.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// A random propagation instance: up to `max_vertices` vertices with
/// arbitrary functions, edges and (partial) states, and rules over
/// random two-vertex patterns. Conflicts are possible.
#[derive(Debug, Clone)]
pub struct PropagationCase {
    pub model: MfmModel,
    pub rules: Vec<RuleSource>,
}

impl PropagationCase {
    pub fn facts(&self) -> FactBase {
        mfm_fol::translate::translate_model(&self.model).expect("generated model translates")
    }

    pub fn horn_rules(&self) -> Vec<HornRule> {
        self.rules
            .iter()
            .flat_map(|r| translate_rule(r).expect("generated rule translates"))
            .collect()
    }
}

pub fn random_propagation_case(rng: &mut impl Rng, max_vertices: usize) -> PropagationCase {
    const FUNCTIONS: [&str; 3] = ["source", "transport", "sink"];
    const RELATIONS: [&str; 2] = ["influencer", "participant"];
    let n = rng.gen_range(2..=max_vertices.max(2));
    let mut model = MfmModel::new("Random");
    for i in 0..n {
        let state = rng.gen_bool(0.8).then(|| *STATES.choose(rng).unwrap());
        model
            .add_vertex(Vertex::new(&format!("V{i}"), FUNCTIONS.choose(rng).unwrap(), state).unwrap())
            .unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.3) {
                let e = Edge::new(
                    &format!("V{i}"),
                    &format!("V{j}"),
                    RELATIONS.choose(rng).unwrap(),
                    rng.gen_bool(0.5),
                )
                .unwrap();
                let _ = model.add_edge(e);
            }
        }
    }
    let mut rules = Vec::new();
    for k in 0..rng.gen_range(2..=10) {
        let name = format!("r{k}");
        let pattern = two_vertex_pattern(
            &name,
            FUNCTIONS.choose(rng).unwrap(),
            FUNCTIONS.choose(rng).unwrap(),
            RELATIONS.choose(rng).unwrap(),
            rng.gen_bool(0.3),
        );
        let var = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { "x" } else { "y" };
        let cause = hold_spec(var(rng), STATES.choose(rng).unwrap());
        let effects = (0..rng.gen_range(1..=2))
            .map(|_| hold_spec(var(rng), STATES.choose(rng).unwrap()))
            .collect();
        rules.push(RuleSource {
            name,
            pattern,
            cause,
            effects,
        });
    }
    PropagationCase { model, rules }
}

/// Least fixpoint by naive iteration over every ground instance of every
/// rule.
pub fn naive_fixpoint(facts: &FactBase, rules: &[HornRule]) -> BTreeSet<Atom> {
    let mut constants: BTreeSet<String> = facts.constants().into_iter().map(String::from).collect();
    for r in rules {
        for a in r.antecedents.iter().chain(std::iter::once(&r.consequent)) {
            for t in &a.args {
                if let Term::Constant(c) = t {
                    constants.insert(c.clone());
                }
            }
        }
    }
    let constants: Vec<String> = constants.into_iter().collect();
    let mut known: BTreeSet<Atom> = facts.atoms().clone();
    loop {
        let mut grew = false;
        for r in rules {
            let vars: Vec<&str> = r.variables().into_iter().collect();
            for values in arg_tuples(&constants, vars.len()) {
                let s = Substitution::from_pairs(
                    vars.iter()
                        .copied()
                        .zip(values.into_iter().map(Term::Constant)),
                )
                .expect("distinct variables");
                let inst = r.apply(&s);
                if inst.antecedents.iter().all(|a| known.contains(a)) && known.insert(inst.consequent) {
                    grew = true;
                }
            }
        }
        if !grew {
            return known;
        }
    }
}
