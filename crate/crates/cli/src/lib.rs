//! Command-line front-end: file loading, dispatch and output formatting.
//!
//! [`run`] takes parsed arguments and writes to the given sinks, so the
//! binary and the tests share one code path.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfm_fol::dsl::{self, ActionSource, Document, RuleSource, DEFAULT_MAX_ACTIONS};
use mfm_fol::fol::{Atom, Substitution};
use mfm_fol::model::{MfmModel, Taxonomy};
use mfm_fol::plan::{abduce_plan, replay_actions, Diagnostic, PlanError, PlanProblem};
use mfm_fol::propagate::forward_propagate;
use mfm_fol::translate::ClauseSet;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mfm-fol", version, about = "Translate, propagate and plan over MFM plant models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the clause set for a model, its rules and actions.
    Translate(CommonArgs),
    /// Forward-chain to the fixpoint; print derived atoms and conflicts.
    Propagate(CommonArgs),
    /// Search for a shortest action sequence reaching the goal.
    Plan(PlanArgs),
    /// Replay a plan file and check that it reaches the goal.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Clauses,
    Text,
    Dot,
    JsonLines,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long)]
    pub actions: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Register an extra function type (repeatable).
    #[arg(long = "function-type", value_name = "LABEL")]
    pub function_types: Vec<String>,
    /// Register an extra relation type (repeatable).
    #[arg(long = "relation-type", value_name = "LABEL")]
    pub relation_types: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Goal atom, e.g. `hold(Pipe1,High)`. Defaults to the model file's
    /// problem block.
    #[arg(long)]
    pub goal: Option<String>,
    #[arg(long = "max-actions")]
    pub max_actions: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Plan file: one action atom per line, or `plan --format json-lines`
    /// output.
    #[arg(long = "plan")]
    pub plan_file: PathBuf,
}

/// An input problem, reported with exit status 2.
#[derive(Debug)]
struct InputError(String);

type Input<T> = Result<T, InputError>;

fn read(path: &Path) -> Input<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn parse_file(path: &Path, taxonomy: &Taxonomy) -> Input<Document> {
    let text = read(path)?;
    dsl::parse_document_with(&text, taxonomy).map_err(|e| InputError(format!("{}:{e}", path.display())))
}

struct Loaded {
    model_path: PathBuf,
    doc: Document,
    model: MfmModel,
    clauses: ClauseSet,
}

fn taxonomy(args: &CommonArgs) -> Input<Taxonomy> {
    let mut t = Taxonomy::default();
    for f in &args.function_types {
        t.register_function(f).map_err(|e| InputError(format!("--function-type: {e}")))?;
    }
    for r in &args.relation_types {
        t.register_relation(r).map_err(|e| InputError(format!("--relation-type: {e}")))?;
    }
    Ok(t)
}

fn load(args: &CommonArgs) -> Input<Loaded> {
    let tax = taxonomy(args)?;
    let doc = parse_file(&args.model, &tax)?;
    let model = match doc.models.as_slice() {
        [m] => m.clone(),
        ms => {
            return Err(InputError(format!(
                "{}: expected exactly one model block, found {}",
                args.model.display(),
                ms.len()
            )))
        }
    };
    let diags = model.validate_with(&tax);
    if let Some(d) = diags.first() {
        return Err(InputError(format!("{}: {d}", args.model.display())));
    }
    let rules: Vec<RuleSource> = parse_file(&args.rules, &tax)?.rules;
    let actions: Vec<ActionSource> = match &args.actions {
        Some(p) => parse_file(p, &tax)?.actions,
        None => Vec::new(),
    };
    let clauses = ClauseSet::compile(&model, &rules, &actions)
        .map_err(|e| InputError(format!("{}: {e}", args.model.display())))?;
    Ok(Loaded {
        model_path: args.model.clone(),
        doc,
        model,
        clauses,
    })
}

fn problem(args: &PlanArgs, loaded: &Loaded) -> Input<PlanProblem> {
    let from_file = loaded
        .doc
        .problems
        .iter()
        .find(|p| p.model_ref == loaded.model.name);
    let goal = match (&args.goal, from_file) {
        (Some(text), _) => Atom::parse(text).map_err(|e| InputError(format!("--goal: {e}")))?,
        (None, Some(p)) => p.goal.clone(),
        (None, None) => {
            return Err(InputError(format!(
                "{}: no --goal given and no problem block for model {}",
                loaded.model_path.display(),
                loaded.model.name
            )))
        }
    };
    let max_actions = args
        .max_actions
        .or(from_file.map(|p| p.max_actions))
        .unwrap_or(DEFAULT_MAX_ACTIONS);
    PlanProblem::new(loaded.clauses.clone(), goal, max_actions).map_err(|e| InputError(e.to_string()))
}

fn substitution_json(s: &Substitution) -> Value {
    Value::Object(s.iter().map(|(v, t)| (v.to_string(), json!(t.to_string()))).collect())
}

fn line(out: &mut String, v: Value) {
    out.push_str(&v.to_string());
    out.push('\n');
}

fn body_json(atoms: &[Atom]) -> Value {
    json!(atoms.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn translate(args: &CommonArgs) -> Input<(i32, String)> {
    let l = load(args)?;
    let out = match args.format.unwrap_or(Format::Clauses) {
        Format::Clauses | Format::Text => l.clauses.emit_clauses(),
        Format::JsonLines => {
            let mut out = String::new();
            for a in l.clauses.facts().iter() {
                line(&mut out, json!({"kind": "fact", "atom": a.to_string()}));
            }
            for r in l.clauses.propagation_rules() {
                line(
                    &mut out,
                    json!({"kind": "rule", "name": r.name, "head": r.consequent.to_string(), "body": body_json(&r.antecedents)}),
                );
            }
            for ar in l.clauses.action_rules() {
                line(&mut out, json!({"kind": "abducible", "atom": ar.action.to_string()}));
                line(
                    &mut out,
                    json!({"kind": "action_rule", "name": ar.rule.name, "head": ar.rule.consequent.to_string(), "body": body_json(&ar.rule.antecedents)}),
                );
            }
            out
        }
        Format::Dot => return Err(InputError("translate supports --format clauses or json-lines".into())),
    };
    Ok((EXIT_OK, out))
}

fn propagate(args: &CommonArgs) -> Input<(i32, String)> {
    let l = load(args)?;
    let r = forward_propagate(l.clauses.facts(), l.clauses.propagation_rules());
    let mut out = String::new();
    match args.format.unwrap_or(Format::Text) {
        Format::Text => {
            for a in &r.derived {
                let _ = writeln!(out, "{a}");
            }
            for c in &r.conflicts {
                let _ = writeln!(out, "conflict {} {} {}", c.vertex, c.states.0, c.states.1);
            }
        }
        Format::JsonLines => {
            let mut steps: Vec<_> = r.trace.iter().collect();
            steps.sort_by(|a, b| a.atom.cmp(&b.atom));
            for s in steps {
                line(
                    &mut out,
                    json!({"kind": "derived", "atom": s.atom.to_string(), "rule": s.rule, "substitution": substitution_json(&s.substitution)}),
                );
            }
            for c in &r.conflicts {
                line(
                    &mut out,
                    json!({"kind": "conflict", "vertex": c.vertex, "states": [c.states.0, c.states.1]}),
                );
            }
        }
        Format::Clauses | Format::Dot => {
            return Err(InputError("propagate supports --format text or json-lines".into()))
        }
    }
    Ok((EXIT_OK, out))
}

fn plan(args: &PlanArgs, err: &mut dyn Write) -> Input<(i32, String)> {
    let l = load(&args.common)?;
    let p = problem(args, &l)?;
    let format = args.common.format.unwrap_or(Format::Text);
    if format == Format::Clauses {
        return Err(InputError("plan supports --format text, dot or json-lines".into()));
    }
    let g = match abduce_plan(&p) {
        Ok(g) => g,
        Err(PlanError::NoPlan(cert)) => {
            let _ = writeln!(err, "{cert}");
            let mut out = String::new();
            if format == Format::JsonLines {
                line(
                    &mut out,
                    json!({"kind": "no_plan", "goal": cert.goal.to_string(), "max_actions": cert.max_actions,
                           "candidates": cert.candidates, "rejected_sequences": cert.rejected_sequences}),
                );
            }
            return Ok((EXIT_FAILED, out));
        }
        Err(e) => return Err(InputError(e.to_string())),
    };
    let mut out = String::new();
    match format {
        Format::Text => {
            for a in &g.action_order {
                let _ = writeln!(out, "{a}");
            }
        }
        Format::Dot => out = g.to_dot(),
        Format::JsonLines => {
            for (i, a) in g.action_order.iter().enumerate() {
                line(&mut out, json!({"kind": "action", "step": i + 1, "atom": a.to_string()}));
            }
            line(
                &mut out,
                json!({"kind": "plan", "goal": p.goal.to_string(), "actions": g.action_order.len(),
                       "nodes": g.nodes.len(), "hyperedges": g.hyperedges.len()}),
            );
        }
        Format::Clauses => unreachable!(),
    }
    Ok((EXIT_OK, out))
}

/// Action atoms from a plan file in text or json-lines form. Blank lines,
/// `#` comments and non-action json records are skipped.
fn read_plan_file(path: &Path) -> Input<Vec<Atom>> {
    let text = read(path)?;
    let mut actions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let at = |msg: String| InputError(format!("{}:{}:1: {msg}", path.display(), i + 1));
        if l.starts_with('{') {
            let v: Value = serde_json::from_str(l).map_err(|e| at(e.to_string()))?;
            if v["kind"] != "action" {
                continue;
            }
            let atom = v["atom"]
                .as_str()
                .ok_or_else(|| at("action record lacks an `atom` string".into()))?;
            actions.push(Atom::parse(atom).map_err(|e| at(e.to_string()))?);
        } else {
            actions.push(Atom::parse(l).map_err(|e| at(e.to_string()))?);
        }
    }
    Ok(actions)
}

fn validate(args: &ValidateArgs) -> Input<(i32, String)> {
    let l = load(&args.plan.common)?;
    let p = problem(&args.plan, &l)?;
    let actions = read_plan_file(&args.plan_file)?;
    let report = replay_actions(&p.clause_set, &p.goal, &actions);
    let mut out = String::new();
    match args.plan.common.format.unwrap_or(Format::Text) {
        Format::Text => {
            for d in &report.diagnostics {
                let _ = writeln!(out, "{d}");
            }
            let _ = writeln!(out, "{}", if report.valid { "valid" } else { "invalid" });
        }
        Format::JsonLines => {
            for d in &report.diagnostics {
                let step = match d {
                    Diagnostic::Replay { step, .. } => json!(step + 1),
                    _ => Value::Null,
                };
                line(&mut out, json!({"kind": "diagnostic", "step": step, "message": d.to_string()}));
            }
            for (v, s) in &report.final_state {
                line(&mut out, json!({"kind": "state", "vertex": v, "state": s}));
            }
            line(&mut out, json!({"kind": "verdict", "valid": report.valid, "actions": actions.len()}));
        }
        Format::Clauses | Format::Dot => {
            return Err(InputError("validate supports --format text or json-lines".into()))
        }
    }
    Ok((if report.valid { EXIT_OK } else { EXIT_FAILED }, out))
}

/// Run one command; returns the exit status.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (out_path, result) = match &cli.command {
        Command::Translate(a) => (&a.out, translate(a)),
        Command::Propagate(a) => (&a.out, propagate(a)),
        Command::Plan(a) => (&a.common.out, plan(a, stderr)),
        Command::Validate(a) => (&a.plan.common.out, validate(a)),
    };
    match result {
        Ok((code, text)) => {
            let written = match out_path {
                Some(p) => fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(InputError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Parse `args` (program name first) and run. Argument errors exit 2.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            EXIT_INPUT
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            EXIT_OK
        }
    }
}

pub fn main_exit() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
