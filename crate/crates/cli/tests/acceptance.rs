//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use mfm_fol::dsl::{self, parse_document};
use mfm_fol::fol::{Atom, HornRule, Term};
use mfm_fol::model::MfmModel;
use mfm_fol::plan::{abduce_plan, replay_actions, validate_plan, PlanError, PlanProblem};
use mfm_fol::propagate::forward_propagate;
use mfm_fol::translate::{translate_model, translate_rule, ClauseSet};
use mfm_fol_testkit::{
    bfs_min_actions, fixture_path, fixture_text, naive_fixpoint, random_plan_case, random_propagation_case, rng,
};

const TRANSLATE_LIMIT: Duration = Duration::from_millis(1);
const EXAMPLE_LIMIT: Duration = Duration::from_millis(10);
const CORPUS_LIMIT: Duration = Duration::from_secs(60);
/// Timed operations are repeated and the median is compared to the limit.
const TIMING_RUNS: usize = 21;
const PLAN_CORPUS: u64 = 200;
const PLAN_BUDGET: usize = 4;
const FIXPOINT_CASES: u64 = 100;
const FIXPOINT_MAX_VERTICES: usize = 8;
const CORPUS_SEED: u64 = 0x4d46_4d00;
const CLI_REPEATS: usize = 3;

type Outcome = Result<String, String>;

fn median<T>(mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut times = Vec::with_capacity(TIMING_RUNS);
    let mut last = None;
    for _ in 0..TIMING_RUNS {
        let t = Instant::now();
        last = Some(f());
        times.push(t.elapsed());
    }
    times.sort();
    (last.unwrap(), times[TIMING_RUNS / 2])
}

fn clause_set(model: &str, actions: &str) -> ClauseSet {
    ClauseSet::compile(
        &dsl::parse_model(&fixture_text(model)).unwrap(),
        &dsl::parse_rules(&fixture_text("rules.mfm")).unwrap(),
        &dsl::parse_actions(&fixture_text(actions)).unwrap(),
    )
    .unwrap()
}

fn atoms(texts: &[&str]) -> Vec<Atom> {
    texts.iter().map(|t| Atom::parse(t).unwrap()).collect()
}

fn translation_fidelity() -> Outcome {
    let model: MfmModel = dsl::parse_model(&fixture_text("toy_plant.mfm")).map_err(|e| e.to_string())?;
    let expected: BTreeSet<Atom> = atoms(&[
        "source(Faucet1)",
        "transport(Pipe1)",
        "influencer(Faucet1,Pipe1)",
        "flow(Faucet1,Pipe1)",
        "hold(Faucet1,No)",
        "hold(Pipe1,No)",
    ])
    .into_iter()
    .collect();
    let (facts, t) = median(|| translate_model(&model));
    let facts = facts.map_err(|e| e.to_string())?;
    if facts.atoms() != &expected {
        return Err(format!("got {:?}", facts.atoms()));
    }
    if t >= TRANSLATE_LIMIT {
        return Err(format!("median {t:?} >= {TRANSLATE_LIMIT:?}"));
    }
    Ok(format!("6 atoms, set-equal; median {t:?}"))
}

/// Equal up to a bijective renaming of variables.
fn alpha_equivalent(a: &HornRule, b: &HornRule) -> bool {
    if a.antecedents.len() != b.antecedents.len() {
        return false;
    }
    let mut fwd: BTreeMap<String, String> = BTreeMap::new();
    let mut back: BTreeMap<String, String> = BTreeMap::new();
    let pairs = a
        .antecedents
        .iter()
        .zip(&b.antecedents)
        .chain(std::iter::once((&a.consequent, &b.consequent)));
    for (x, y) in pairs {
        if x.predicate != y.predicate || x.args.len() != y.args.len() {
            return false;
        }
        for (s, t) in x.args.iter().zip(&y.args) {
            match (s, t) {
                (Term::Constant(c), Term::Constant(d)) if c == d => {}
                (Term::Variable(v), Term::Variable(w)) => {
                    if fwd.entry(v.clone()).or_insert_with(|| w.clone()) != w
                        || back.entry(w.clone()).or_insert_with(|| v.clone()) != v
                    {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

fn rule_fidelity() -> Outcome {
    let rules = dsl::parse_rules(&fixture_text("rules.mfm")).map_err(|e| e.to_string())?;
    let high = rules
        .iter()
        .find(|r| r.name == "source_high")
        .ok_or("rule source_high missing")?;
    let compiled = translate_rule(high).map_err(|e| e.to_string())?;
    let expected = HornRule::new(
        "expected",
        atoms(&["source(a)", "transport(b)", "flow(a,b)", "influencer(a,b)", "hold(a,High)"]),
        Atom::parse("hold(b,High)").unwrap(),
    )
    .unwrap();
    match compiled.as_slice() {
        [r] if alpha_equivalent(r, &expected) => Ok(format!("{r}")),
        other => Err(format!("compiled to {other:?}")),
    }
}

fn example(model: &str, actions: &str, expect: &[&str], check_reverse: bool) -> Outcome {
    let c = clause_set(model, actions);
    let goal = Atom::hold("Pipe1", "High");
    let p = PlanProblem::new(c, goal.clone(), dsl::DEFAULT_MAX_ACTIONS).map_err(|e| e.to_string())?;
    let (g, t) = median(|| abduce_plan(&p));
    let g = g.map_err(|e| e.to_string())?;
    let expect = atoms(expect);
    if g.action_order != expect {
        return Err(format!("plan {:?}", g.action_order));
    }
    let report = validate_plan(&p, &g);
    if !report.valid {
        return Err(format!("validation failed: {:?}", report.diagnostics));
    }
    let mut note = String::new();
    if check_reverse {
        let reversed: Vec<Atom> = expect.iter().rev().cloned().collect();
        let mut rg = g.clone();
        rg.action_order = reversed.clone();
        if validate_plan(&p, &rg).valid || replay_actions(&p.clause_set, &goal, &reversed).valid {
            return Err("reversed order validated".into());
        }
        note.push_str("; reversed order rejected");
    }
    if t >= EXAMPLE_LIMIT {
        return Err(format!("median {t:?} >= {EXAMPLE_LIMIT:?}"));
    }
    let shown: Vec<String> = g.action_order.iter().map(ToString::to_string).collect();
    Ok(format!("[{}] validated{note}; median {t:?}", shown.join(", ")))
}

struct CorpusStats {
    plans: usize,
    unsound: Vec<u64>,
    mismatched: Vec<(u64, Option<usize>, Option<usize>)>,
    by_length: BTreeMap<Option<usize>, usize>,
    elapsed: Duration,
}

fn corpus() -> CorpusStats {
    let start = Instant::now();
    let mut s = CorpusStats {
        plans: 0,
        unsound: Vec::new(),
        mismatched: Vec::new(),
        by_length: BTreeMap::new(),
        elapsed: Duration::ZERO,
    };
    for i in 0..PLAN_CORPUS {
        let seed = CORPUS_SEED + i;
        let mut case = random_plan_case(&mut rng(seed));
        case.max_actions = PLAN_BUDGET;
        let p = case.problem();
        let planned = match abduce_plan(&p) {
            Ok(g) => {
                s.plans += 1;
                if !validate_plan(&p, &g).valid {
                    s.unsound.push(seed);
                }
                Some(g.action_order.len())
            }
            Err(PlanError::NoPlan(_)) => None,
            Err(_) => {
                s.unsound.push(seed);
                None
            }
        };
        let oracle = bfs_min_actions(&p.clause_set, &p.goal, PLAN_BUDGET);
        *s.by_length.entry(oracle).or_default() += 1;
        if planned != oracle {
            s.mismatched.push((seed, planned, oracle));
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn soundness(s: &CorpusStats) -> Outcome {
    if s.unsound.is_empty() {
        Ok(format!("{} plans over {PLAN_CORPUS} problems, all replay", s.plans))
    } else {
        Err(format!("unsound seeds {:?}", s.unsound))
    }
}

fn minimality(s: &CorpusStats) -> Outcome {
    let dist: Vec<String> = s
        .by_length
        .iter()
        .map(|(k, n)| match k {
            Some(k) => format!("{k} actions: {n}"),
            None => format!("none: {n}"),
        })
        .collect();
    if !s.mismatched.is_empty() {
        return Err(format!("{} mismatches (seed, planner, oracle): {:?}", s.mismatched.len(), s.mismatched));
    }
    if s.elapsed >= CORPUS_LIMIT {
        return Err(format!("corpus took {:?} >= {CORPUS_LIMIT:?}", s.elapsed));
    }
    Ok(format!("exact on {PLAN_CORPUS} problems ({}); {:?}", dist.join(", "), s.elapsed))
}

fn fixpoint() -> Outcome {
    let mut derived_total = 0;
    for i in 0..FIXPOINT_CASES {
        let seed = CORPUS_SEED ^ (i << 20);
        let case = random_propagation_case(&mut rng(seed), FIXPOINT_MAX_VERTICES);
        let (facts, rules) = (case.facts(), case.horn_rules());
        let r = forward_propagate(&facts, &rules);
        let oracle: BTreeSet<Atom> = naive_fixpoint(&facts, &rules)
            .into_iter()
            .filter(|a| !facts.contains(a))
            .collect();
        if r.derived != oracle {
            return Err(format!("seed {seed}: {:?} vs {:?}", r.derived, oracle));
        }
        derived_total += oracle.len();
    }
    Ok(format!("{FIXPOINT_CASES} cases equal ({derived_total} derived atoms in total)"))
}

fn cli(args: &[String]) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_mfm-fol"))
        .args(args)
        .output()
        .expect("binary runs");
    (o.status.code(), o.stdout, o.stderr)
}

fn round_trip_and_determinism() -> Outcome {
    let dir = fixture_path("");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".mfm"))
        .collect();
    names.sort();
    for n in &names {
        let first = parse_document(&fixture_text(n)).map_err(|e| format!("{n}: {e}"))?;
        let printed = first.to_string();
        let second = parse_document(&printed).map_err(|e| format!("{n} reprinted: {e}"))?;
        if first != second || second.to_string() != printed {
            return Err(format!("{n} does not round-trip"));
        }
    }

    let f = |n: &str| fixture_path(n).display().to_string();
    let mut invocations: Vec<Vec<String>> = Vec::new();
    for cmd in ["translate", "propagate"] {
        for format in ["text", "json-lines"] {
            invocations.push(vec![
                cmd.into(),
                "--model".into(),
                f("chain.mfm"),
                "--rules".into(),
                f("rules.mfm"),
                "--actions".into(),
                f("actions_open_close.mfm"),
                "--format".into(),
                format.into(),
            ]);
        }
    }
    for (model, actions) in [
        ("toy_plant.mfm", "actions_open.mfm"),
        ("toy_plant_low.mfm", "actions_open_close.mfm"),
        ("toy_plant_low.mfm", "actions_open.mfm"),
    ] {
        for format in ["text", "dot", "json-lines"] {
            invocations.push(vec![
                "plan".into(),
                "--model".into(),
                f(model),
                "--rules".into(),
                f("rules.mfm"),
                "--actions".into(),
                f(actions),
                "--format".into(),
                format.into(),
            ]);
        }
    }
    for args in &invocations {
        let reference = cli(args);
        for _ in 1..CLI_REPEATS {
            if cli(args) != reference {
                return Err(format!("output differs across runs: {}", args.join(" ")));
            }
        }
    }
    Ok(format!(
        "{} fixtures round-trip; {} invocations byte-identical over {CLI_REPEATS} runs",
        names.len(),
        invocations.len()
    ))
}

fn main() {
    let stats = corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 translation fidelity", translation_fidelity()),
        ("2 rule translation fidelity", rule_fidelity()),
        (
            "3 example 1 plan",
            example("toy_plant.mfm", "actions_open.mfm", &["open(Faucet1)"], false),
        ),
        (
            "4 example 2 plan",
            example(
                "toy_plant_low.mfm",
                "actions_open_close.mfm",
                &["close(Faucet1)", "open(Faucet1)"],
                true,
            ),
        ),
        ("5 forward/backward consistency", soundness(&stats)),
        ("6 oracle minimality", minimality(&stats)),
        ("7 fixpoint equivalence", fixpoint()),
        ("8 round-trip and determinism", round_trip_and_determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
