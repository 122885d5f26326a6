use std::collections::BTreeSet;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::{
    ActionSource, Document, HoldSpec, ParseError, ParseErrorKind, ProblemSource, RuleSource,
    DEFAULT_MAX_ACTIONS,
};
use crate::fol::{is_constant_name, is_lower_name, Atom, Term, FLOW, HOLD};
use crate::model::{Edge, FunctionType, MfmModel, ModelError, RelationType, StateLabel, Taxonomy, Vertex};

const RESERVED_LABELS: &[&str] = &[HOLD, FLOW];

/// Parse a whole `.mfm` text, checking labels against `taxonomy`.
pub fn parse_document_with(text: &str, taxonomy: &Taxonomy) -> Result<Document, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        taxonomy,
    };
    p.document()
}

struct Parser<'t> {
    tokens: Vec<Token>,
    pos: usize,
    taxonomy: &'t Taxonomy,
}

enum NameKind {
    Constant,
    Variable,
    Label,
}

impl NameKind {
    fn describe(&self) -> &'static str {
        match self {
            NameKind::Constant => "capitalised name",
            NameKind::Variable => "lower-case variable name",
            NameKind::Label => "lower-case identifier",
        }
    }

    fn accepts(&self, s: &str) -> bool {
        match self {
            NameKind::Constant => is_constant_name(s),
            NameKind::Variable | NameKind::Label => is_lower_name(s),
        }
    }
}

fn semantic(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::Semantic(msg.into()),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.pos.line,
            column: t.pos.column,
            kind: ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: t.tok.describe(),
            },
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance().pos)
        } else {
            Err(self.syntax(&[&tok.describe()]))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        if self.at_keyword(kw) {
            Ok(self.advance().pos)
        } else {
            Err(self.syntax(&[&format!("`{kw}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.advance().pos))
            }
            _ => Err(self.syntax(&[what])),
        }
    }

    fn name(&mut self, kind: NameKind) -> Result<(String, Pos), ParseError> {
        let what = kind.describe();
        match &self.peek().tok {
            Tok::Ident(s) if kind.accepts(s) => {
                let s = s.clone();
                Ok((s, self.advance().pos))
            }
            _ => Err(self.syntax(&[what])),
        }
    }

    fn document(&mut self) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        let mut rule_names = BTreeSet::new();
        let mut action_names = BTreeSet::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => return Ok(doc),
                Tok::Ident(kw) => match kw.as_str() {
                    "model" => doc.models.push(self.model()?),
                    "rule" => {
                        let pos = self.peek().pos;
                        let r = self.rule()?;
                        if !rule_names.insert(r.name.clone()) {
                            return Err(semantic(pos, format!("duplicate rule name `{}`", r.name)));
                        }
                        doc.rules.push(r);
                    }
                    "action" => {
                        let pos = self.peek().pos;
                        let a = self.action()?;
                        if !action_names.insert(a.action_name.clone()) {
                            return Err(semantic(
                                pos,
                                format!("duplicate action name `{}`", a.action_name),
                            ));
                        }
                        doc.actions.push(a);
                    }
                    "problem" => doc.problems.push(self.problem()?),
                    _ => return Err(self.syntax(&["`model`", "`rule`", "`action`", "`problem`"])),
                },
                _ => return Err(self.syntax(&["`model`", "`rule`", "`action`", "`problem`"])),
            }
        }
    }

    fn function_label(&mut self) -> Result<FunctionType, ParseError> {
        let (label, pos) = self.name(NameKind::Label)?;
        if RESERVED_LABELS.contains(&label.as_str()) {
            return Err(semantic(pos, format!("`{label}` is a reserved predicate")));
        }
        let f = FunctionType::new(&label).map_err(|e| semantic(pos, e.to_string()))?;
        if !self.taxonomy.has_function(&f) {
            return Err(semantic(pos, format!("unknown function type `{label}`")));
        }
        Ok(f)
    }

    fn relation_label(&mut self) -> Result<RelationType, ParseError> {
        let (label, pos) = self.name(NameKind::Label)?;
        if RESERVED_LABELS.contains(&label.as_str()) {
            return Err(semantic(pos, format!("`{label}` is a reserved predicate")));
        }
        let r = RelationType::new(&label).map_err(|e| semantic(pos, e.to_string()))?;
        if !self.taxonomy.has_relation(&r) {
            return Err(semantic(pos, format!("unknown relation type `{label}`")));
        }
        Ok(r)
    }

    /// `vertex NAME ":" IDENT ("state" SNAME)? ";"`; returns the vertex and
    /// the position of its `state` keyword, if any.
    fn vertex_decl(&mut self, kind: NameKind) -> Result<(Vertex, Pos, Option<Pos>), ParseError> {
        let start = self.keyword("vertex")?;
        let (name, _) = self.name(kind)?;
        self.expect(Tok::Colon)?;
        let function = self.function_label()?;
        let mut state = None;
        let mut state_pos = None;
        if self.at_keyword("state") {
            state_pos = Some(self.advance().pos);
            let (s, _) = self.name(NameKind::Constant)?;
            state = Some(StateLabel::new(&s).expect("checked by name()"));
            if self.at_keyword("state") {
                return Err(semantic(
                    self.peek().pos,
                    format!("multiple states declared for vertex `{name}`"),
                ));
            }
        }
        self.expect(Tok::Semi)?;
        Ok((
            Vertex {
                name,
                function,
                state,
            },
            start,
            state_pos,
        ))
    }

    fn edge_decl(&mut self, kind: fn() -> NameKind) -> Result<(Edge, Pos), ParseError> {
        let start = self.keyword("edge")?;
        let (from, _) = self.name(kind())?;
        self.expect(Tok::Arrow)?;
        let (to, _) = self.name(kind())?;
        self.expect(Tok::Colon)?;
        let relation = self.relation_label()?;
        let carries_flow = if self.at_keyword("flow") {
            self.advance();
            true
        } else {
            false
        };
        self.expect(Tok::Semi)?;
        Ok((
            Edge {
                from,
                to,
                relation,
                carries_flow,
            },
            start,
        ))
    }

    fn add_vertex(model: &mut MfmModel, v: Vertex, pos: Pos) -> Result<(), ParseError> {
        model
            .add_vertex(v)
            .map(|_| ())
            .map_err(|e| semantic(pos, e.to_string()))
    }

    fn add_edge(model: &mut MfmModel, e: Edge, pos: Pos) -> Result<(), ParseError> {
        model.add_edge(e).map(|_| ()).map_err(|e| {
            let msg = match &e {
                ModelError::UnknownEndpoint { missing, .. } => {
                    format!("edge names undeclared vertex `{missing}`")
                }
                other => other.to_string(),
            };
            semantic(pos, msg)
        })
    }

    fn model(&mut self) -> Result<MfmModel, ParseError> {
        self.keyword("model")?;
        let (name, _) = self.ident("model name")?;
        self.expect(Tok::LBrace)?;
        let mut m = MfmModel::new(&name);
        loop {
            if self.at_keyword("vertex") {
                let (v, pos, _) = self.vertex_decl(NameKind::Constant)?;
                Self::add_vertex(&mut m, v, pos)?;
            } else if self.at_keyword("edge") {
                let (e, pos) = self.edge_decl(|| NameKind::Constant)?;
                Self::add_edge(&mut m, e, pos)?;
            } else if self.peek().tok == Tok::RBrace {
                self.advance();
                return Ok(m);
            } else {
                return Err(self.syntax(&["`vertex`", "`edge`", "`}`"]));
            }
        }
    }

    fn atom(&mut self) -> Result<(Atom, Pos), ParseError> {
        let (pred, pos) = self.name(NameKind::Label)?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.advance();
            if self.peek().tok != Tok::RParen {
                loop {
                    let (arg, apos) = self.ident("term")?;
                    args.push(Term::parse(&arg).map_err(|e| semantic(apos, e.to_string()))?);
                    if self.peek().tok == Tok::Comma {
                        self.advance();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok((
            Atom {
                predicate: pred,
                args,
            },
            pos,
        ))
    }

    fn hold_atom(&mut self) -> Result<(Atom, Pos), ParseError> {
        let (a, pos) = self.atom()?;
        if !a.is_hold() {
            return Err(semantic(pos, format!("expected a hold(vertex,State) atom, found `{a}`")));
        }
        if !a.args[1].is_ground() {
            return Err(semantic(pos, format!("state in `{a}` must be a capitalised label")));
        }
        Ok((a, pos))
    }

    fn hold_spec(&mut self, pattern: &MfmModel) -> Result<HoldSpec, ParseError> {
        let (a, pos) = self.hold_atom()?;
        let vertex = match &a.args[0] {
            Term::Variable(v) if pattern.vertex(v).is_some() => v.clone(),
            other => {
                return Err(semantic(
                    pos,
                    format!("`{other}` in `{a}` is not a vertex of the rule pattern"),
                ))
            }
        };
        Ok(HoldSpec {
            vertex,
            state: StateLabel::new(a.args[1].name()).expect("constant"),
        })
    }

    fn rule(&mut self) -> Result<RuleSource, ParseError> {
        self.keyword("rule")?;
        let (name, _) = self.ident("rule name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("pattern")?;
        self.expect(Tok::LBrace)?;
        let mut pattern = MfmModel::new(&name);
        loop {
            if self.at_keyword("vertex") {
                let (v, pos, state_pos) = self.vertex_decl(NameKind::Variable)?;
                if let Some(sp) = state_pos {
                    return Err(semantic(
                        sp,
                        format!("pattern vertex `{}` must not carry a state", v.name),
                    ));
                }
                Self::add_vertex(&mut pattern, v, pos)?;
            } else if self.at_keyword("edge") {
                let (e, pos) = self.edge_decl(|| NameKind::Variable)?;
                Self::add_edge(&mut pattern, e, pos)?;
            } else if self.peek().tok == Tok::RBrace {
                self.advance();
                break;
            } else {
                return Err(self.syntax(&["`vertex`", "`edge`", "`}`"]));
            }
        }
        self.keyword("cause")?;
        let cause = self.hold_spec(&pattern)?;
        self.expect(Tok::Semi)?;
        let mut effects = Vec::new();
        loop {
            self.keyword("effect")?;
            effects.push(self.hold_spec(&pattern)?);
            self.expect(Tok::Semi)?;
            if self.peek().tok == Tok::RBrace {
                self.advance();
                break;
            }
            if !self.at_keyword("effect") {
                return Err(self.syntax(&["`effect`", "`}`"]));
            }
        }
        Ok(RuleSource {
            name,
            pattern,
            cause,
            effects,
        })
    }

    fn action(&mut self) -> Result<ActionSource, ParseError> {
        self.keyword("action")?;
        let (action_name, name_pos) = self.name(NameKind::Label)?;
        if RESERVED_LABELS.contains(&action_name.as_str()) {
            return Err(semantic(name_pos, format!("`{action_name}` is a reserved predicate")));
        }
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        loop {
            let (p, ppos) = self.name(NameKind::Variable)?;
            if params.contains(&p) {
                return Err(semantic(ppos, format!("duplicate parameter `{p}`")));
            }
            params.push(p);
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let check_vars = |a: &Atom, pos: Pos, params: &[String]| -> Result<(), ParseError> {
            match a.variables().find(|v| !params.iter().any(|p| p == v)) {
                Some(v) => Err(semantic(
                    pos,
                    format!("variable `{v}` in `{a}` is not a parameter of `{action_name}`"),
                )),
                None => Ok(()),
            }
        };
        let mut preconditions = Vec::new();
        while self.at_keyword("pre") {
            self.advance();
            let (a, pos) = self.atom()?;
            check_vars(&a, pos, &params)?;
            preconditions.push(a);
            self.expect(Tok::Semi)?;
        }
        if !self.at_keyword("effect") {
            return Err(self.syntax(&["`pre`", "`effect`"]));
        }
        self.advance();
        let (effect, epos) = self.atom()?;
        if !effect.is_hold() {
            return Err(semantic(
                epos,
                format!("action effect must be a hold atom, found `{effect}`"),
            ));
        }
        if !effect.args[1].is_ground() {
            return Err(semantic(epos, format!("state in `{effect}` must be a capitalised label")));
        }
        check_vars(&effect, epos, &params)?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        for p in &params {
            let used = effect
                .variables()
                .chain(preconditions.iter().flat_map(Atom::variables))
                .any(|v| v == p);
            if !used {
                return Err(semantic(
                    name_pos,
                    format!("parameter `{p}` of `{action_name}` occurs in no precondition or effect"),
                ));
            }
        }
        Ok(ActionSource {
            action_name,
            params,
            preconditions,
            effect,
        })
    }

    fn problem(&mut self) -> Result<ProblemSource, ParseError> {
        self.keyword("problem")?;
        self.expect(Tok::LBrace)?;
        self.keyword("model")?;
        let (model_ref, _) = self.ident("model name")?;
        self.expect(Tok::Semi)?;
        self.keyword("goal")?;
        let (goal, gpos) = self.hold_atom()?;
        if !goal.is_ground() {
            return Err(semantic(gpos, format!("goal `{goal}` must be ground")));
        }
        self.expect(Tok::Semi)?;
        let mut max_actions = DEFAULT_MAX_ACTIONS;
        if self.at_keyword("max_actions") {
            self.advance();
            let t = self.advance();
            max_actions = match t.tok {
                Tok::Int(s) => s
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| semantic(t.pos, "max_actions must be a positive integer"))?,
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax(&["integer"]));
                }
            };
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(ProblemSource {
            model_ref,
            goal,
            max_actions,
        })
    }
}
