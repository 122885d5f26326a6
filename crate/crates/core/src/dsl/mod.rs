//! Textual `.mfm` format for plant models, propagation rules, actions and
//! planning problems.
//!
//! ```text
//! # a faucet feeding a pipe
//! model ToyPlant {
//!     vertex Faucet1: source state No;
//!     vertex Pipe1: transport state No;
//!     edge Faucet1 -> Pipe1: influencer flow;
//! }
//!
//! rule high {
//!     pattern {
//!         vertex x: source;
//!         vertex y: transport;
//!         edge x -> y: influencer flow;
//!     }
//!     cause hold(x,High);
//!     effect hold(y,High);
//! }
//!
//! action open(v) {
//!     pre hold(v,No);
//!     effect hold(v,High);
//! }
//!
//! problem {
//!     model ToyPlant;
//!     goal hold(Pipe1,High);
//!     max_actions 5;
//! }
//! ```
//!
//! Model vertex names are capitalised constants; pattern vertex names are
//! lower-case and act as variables.

mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

use crate::fol::{Atom, Term, HOLD};
use crate::model::{MfmModel, StateLabel, Taxonomy};

pub use parser::parse_document_with;

pub const DEFAULT_MAX_ACTIONS: usize = 5;

/// `hold(vertex, state)` as written in a rule's cause or effect.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HoldSpec {
    pub vertex: String,
    pub state: StateLabel,
}

impl HoldSpec {
    /// The `hold` atom with `vertex` as a variable.
    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: HOLD.to_string(),
            args: vec![
                Term::Variable(self.vertex.clone()),
                Term::Constant(self.state.to_string()),
            ],
        }
    }
}

/// An influence propagation rule: a stateless pattern, a cause and one or
/// more effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSource {
    pub name: String,
    pub pattern: MfmModel,
    pub cause: HoldSpec,
    pub effects: Vec<HoldSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSource {
    pub action_name: String,
    pub params: Vec<String>,
    pub preconditions: Vec<Atom>,
    pub effect: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSource {
    pub model_ref: String,
    pub goal: Atom,
    pub max_actions: usize,
}

/// Everything declared in one `.mfm` text, per kind in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub models: Vec<MfmModel>,
    pub rules: Vec<RuleSource>,
    pub actions: Vec<ActionSource>,
    pub problems: Vec<ProblemSource>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<String>, found: String },
    Semantic(String),
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected {}, found {found}", expected.join(" or "))
            }
            ParseErrorKind::Semantic(msg) => write!(f, "semantic error: {msg}"),
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    parse_document_with(text, &Taxonomy::default())
}

/// The single model declared in `text`.
pub fn parse_model(text: &str) -> Result<MfmModel, ParseError> {
    parse_model_with(text, &Taxonomy::default())
}

pub fn parse_model_with(text: &str, taxonomy: &Taxonomy) -> Result<MfmModel, ParseError> {
    let doc = parse_document_with(text, taxonomy)?;
    let n = doc.models.len();
    let mut models = doc.models.into_iter();
    match (models.next(), n) {
        (Some(m), 1) => Ok(m),
        (None, _) => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Semantic("no model block found".into()),
        }),
        (Some(_), _) => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Semantic(format!("expected one model block, found {n}")),
        }),
    }
}

pub fn parse_rules(text: &str) -> Result<Vec<RuleSource>, ParseError> {
    Ok(parse_document(text)?.rules)
}

pub fn parse_rules_with(text: &str, taxonomy: &Taxonomy) -> Result<Vec<RuleSource>, ParseError> {
    Ok(parse_document_with(text, taxonomy)?.rules)
}

pub fn parse_actions(text: &str) -> Result<Vec<ActionSource>, ParseError> {
    Ok(parse_document(text)?.actions)
}

pub fn parse_problems(text: &str) -> Result<Vec<ProblemSource>, ParseError> {
    Ok(parse_document(text)?.problems)
}
