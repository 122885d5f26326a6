//! First-order language core: terms, atoms, formulae, substitutions and
//! flat unification.
//!
//! Terms are constants or variables only; there are no function symbols.
//! A term's variant is decided by the case of its first letter: constants
//! are capitalised (`Faucet1`), variables are lower-case (`x`).
//! Every variable is implicitly universally quantified.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("invalid {kind} `{text}`: {reason}")]
    InvalidIdentifier {
        kind: &'static str,
        text: String,
        reason: &'static str,
    },
    #[error("rule `{rule}` is not range-restricted: variable `{variable}` occurs in the consequent but in no antecedent")]
    NotRangeRestricted { rule: String, variable: String },
    #[error("formula is not a Horn implication: {0}")]
    NonHorn(String),
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
}

fn tail_ok(s: &str) -> bool {
    s.chars().skip(1).all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `[A-Z][A-Za-z0-9_]*`
pub fn is_constant_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && tail_ok(s)
}

/// `[a-z][A-Za-z0-9_]*`; used for variables, predicates and type labels.
pub fn is_lower_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase()) && tail_ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    /// Classify an identifier by the case of its first letter.
    pub fn parse(text: &str) -> Result<Term, FolError> {
        if is_constant_name(text) {
            Ok(Term::Constant(text.to_string()))
        } else if is_lower_name(text) {
            Ok(Term::Variable(text.to_string()))
        } else {
            Err(FolError::InvalidIdentifier {
                kind: "term",
                text: text.to_string(),
                reason: "expected a capitalised constant or a lower-case variable",
            })
        }
    }

    pub fn constant(name: &str) -> Result<Term, FolError> {
        if is_constant_name(name) {
            Ok(Term::Constant(name.to_string()))
        } else {
            Err(FolError::InvalidIdentifier {
                kind: "constant",
                text: name.to_string(),
                reason: "constants must start with an upper-case letter",
            })
        }
    }

    pub fn variable(name: &str) -> Result<Term, FolError> {
        if is_lower_name(name) {
            Ok(Term::Variable(name.to_string()))
        } else {
            Err(FolError::InvalidIdentifier {
                kind: "variable",
                text: name.to_string(),
                reason: "variables must start with a lower-case letter",
            })
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Constant(_))
    }

    pub fn as_constant(&self) -> Option<&str> {
        match self {
            Term::Constant(n) => Some(n),
            Term::Variable(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `p(t1,...,tn)` with `n >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Result<Atom, FolError> {
        if !is_lower_name(predicate) {
            return Err(FolError::InvalidIdentifier {
                kind: "predicate",
                text: predicate.to_string(),
                reason: "predicates must start with a lower-case letter",
            });
        }
        Ok(Atom {
            predicate: predicate.to_string(),
            args,
        })
    }

    /// Build an atom from identifier strings, classifying each by case.
    ///
    /// Panics on malformed identifiers; intended for literals in tests and
    /// fixtures. Use [`Atom::parse`] for untrusted text.
    pub fn from_names(predicate: &str, args: &[&str]) -> Atom {
        let args = args
            .iter()
            .map(|a| Term::parse(a).expect("malformed term literal"))
            .collect();
        Atom::new(predicate, args).expect("malformed predicate literal")
    }

    /// `hold(Vertex,State)` for constant vertex and state names.
    pub fn hold(vertex: &str, state: &str) -> Atom {
        Atom::from_names(HOLD, &[vertex, state])
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn is_hold(&self) -> bool {
        self.predicate == HOLD && self.args.len() == 2
    }

    /// `(vertex, state)` when this is a ground `hold` atom.
    pub fn as_ground_hold(&self) -> Option<(&str, &str)> {
        if !self.is_hold() {
            return None;
        }
        Some((self.args[0].as_constant()?, self.args[1].as_constant()?))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            Term::Constant(_) => None,
        })
    }

    pub fn apply(&self, s: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| s.apply_term(t)).collect(),
        }
    }

    /// Parse the textual syntax `pred(Arg1,Arg2)`; whitespace is ignored.
    /// A nullary atom may be written `p` or `p()`.
    pub fn parse(text: &str) -> Result<Atom, FolError> {
        let mut p = TextParser::new(text);
        let atom = p.atom()?;
        p.skip_ws();
        if !p.at_end() {
            return Err(p.error("trailing input after atom"));
        }
        Ok(atom)
    }
}

pub const HOLD: &str = "hold";
pub const FLOW: &str = "flow";

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// Idempotent mapping from variable names to terms.
///
/// No binding maps a variable to itself and no bound variable occurs in a
/// bound term, so applying a substitution once is the same as applying it
/// any number of times.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Variable(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Constant(_) => t.clone(),
        }
    }

    /// Add `var ↦ term`, keeping the substitution idempotent. Returns false
    /// (leaving `self` untouched) if `var` is already bound to a different
    /// constant.
    pub fn bind(&mut self, var: &str, term: &Term) -> bool {
        let term = self.apply_term(term);
        if let Some(existing) = self.bindings.get(var) {
            return match (existing.clone(), &term) {
                (a, b) if &a == b => true,
                (Term::Variable(w), _) => self.bind(&w, &term),
                (a, Term::Variable(w)) => self.bind(w, &a),
                _ => false,
            };
        }
        if term == Term::Variable(var.to_string()) {
            return true;
        }
        let target = Term::Variable(var.to_string());
        for bound in self.bindings.values_mut() {
            if *bound == target {
                *bound = term.clone();
            }
        }
        self.bindings.insert(var.to_string(), term);
        true
    }

    /// Build from `(variable, term)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Term)>) -> Option<Self> {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            if !s.bind(v, &t) {
                return None;
            }
        }
        Some(s)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

pub fn apply_substitution(a: &Atom, s: &Substitution) -> Atom {
    a.apply(s)
}

/// Most general unifier of two atoms, or `None`.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_with(a, b, &Substitution::new())
}

/// Extend `base` to a most general unifier of `a` and `b`.
pub fn unify_with(a: &Atom, b: &Atom, base: &Substitution) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = base.clone();
    for (x, y) in a.args.iter().zip(&b.args) {
        let x = s.apply_term(x);
        let y = s.apply_term(y);
        let ok = match (&x, &y) {
            (Term::Constant(p), Term::Constant(q)) => p == q,
            (Term::Variable(v), t) | (t, Term::Variable(v)) => s.bind(v, t),
        };
        if !ok {
            return None;
        }
    }
    Some(s)
}

/// Horn clause `a1 ∧ … ∧ an ⇒ c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornRule {
    pub name: String,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
}

impl HornRule {
    /// Construct a rule, rejecting any consequent variable absent from the
    /// antecedents.
    pub fn new(name: &str, antecedents: Vec<Atom>, consequent: Atom) -> Result<Self, FolError> {
        let rule = HornRule {
            name: name.to_string(),
            antecedents,
            consequent,
        };
        rule.check_range_restricted()?;
        Ok(rule)
    }

    pub fn check_range_restricted(&self) -> Result<(), FolError> {
        let body: BTreeSet<&str> = self.antecedents.iter().flat_map(Atom::variables).collect();
        match self.consequent.variables().find(|v| !body.contains(v)) {
            Some(v) => Err(FolError::NotRangeRestricted {
                rule: self.name.clone(),
                variable: v.to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.antecedents
            .iter()
            .chain(std::iter::once(&self.consequent))
            .flat_map(Atom::variables)
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    pub fn apply(&self, s: &Substitution) -> HornRule {
        HornRule {
            name: self.name.clone(),
            antecedents: self.antecedents.iter().map(|a| a.apply(s)).collect(),
            consequent: self.consequent.apply(s),
        }
    }

    /// Rename every variable `v` to `v_<suffix>`.
    pub fn rename_apart(&self, suffix: &str) -> HornRule {
        let mut s = Substitution::new();
        for v in self.variables() {
            s.bind(v, &Term::Variable(format!("{v}_{suffix}")));
        }
        self.apply(&s)
    }

    pub fn to_formula(&self) -> Formula {
        let consequent = Formula::Atomic(self.consequent.clone());
        let mut body = self.antecedents.iter().cloned().map(Formula::Atomic);
        match body.next() {
            None => consequent,
            Some(first) => {
                let conj = body.fold(first, |acc, a| Formula::And(Box::new(acc), Box::new(a)));
                Formula::Implies(Box::new(conj), Box::new(consequent))
            }
        }
    }

    /// Accept `A1 ∧ … ∧ An ⇒ C`, or a bare atom as a fact-like rule.
    pub fn from_formula(name: &str, f: &Formula) -> Result<HornRule, FolError> {
        let (body, head) = match f {
            Formula::Implies(b, h) => (Some(b.as_ref()), h.as_ref()),
            other => (None, other),
        };
        let consequent = match head {
            Formula::Atomic(a) => a.clone(),
            other => {
                return Err(FolError::NonHorn(format!(
                    "consequent `{other}` must be a single atom"
                )))
            }
        };
        let mut antecedents = Vec::new();
        if let Some(b) = body {
            collect_conjuncts(b, &mut antecedents)?;
        }
        HornRule::new(name, antecedents, consequent)
    }
}

fn collect_conjuncts(f: &Formula, out: &mut Vec<Atom>) -> Result<(), FolError> {
    match f {
        Formula::Atomic(a) => {
            out.push(a.clone());
            Ok(())
        }
        Formula::And(l, r) => {
            collect_conjuncts(l, out)?;
            collect_conjuncts(r, out)
        }
        Formula::Or(..) => Err(FolError::NonHorn(format!(
            "disjunction `{f}` in a rule body"
        ))),
        Formula::Not(_) => Err(FolError::NonHorn(format!("negation `{f}` in a rule body"))),
        Formula::Implies(..) => Err(FolError::NonHorn(format!(
            "nested implication `{f}` in a rule body"
        ))),
    }
}

impl fmt::Display for HornRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.consequent)?;
        if !self.antecedents.is_empty() {
            f.write_str(" :- ")?;
            for (i, a) in self.antecedents.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

/// Quantifier-free formula. Only the Horn fragment is consumed by the
/// engines; `Or` and `Not` exist so arbitrary formulae can be represented
/// and rejected with a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atomic(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Parse `&` (and), `|` (or), `!` (not) and `=>` (implies). Binding
    /// strength decreases in that order except `!`, which binds tightest;
    /// `=>` associates to the right.
    pub fn parse(text: &str) -> Result<Formula, FolError> {
        let mut p = TextParser::new(text);
        let f = p.implication()?;
        p.skip_ws();
        if !p.at_end() {
            return Err(p.error("trailing input after formula"));
        }
        Ok(f)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(_) | Formula::Atomic(_) => 3,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, child: &Formula, min: u8| {
            if child.precedence() < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self {
            Formula::Atomic(a) => write!(f, "{a}"),
            Formula::Not(x) => {
                f.write_str("!")?;
                wrap(f, x, 3)
            }
            Formula::And(l, r) => {
                wrap(f, l, 2)?;
                f.write_str(" & ")?;
                wrap(f, r, 3)
            }
            Formula::Or(l, r) => {
                wrap(f, l, 1)?;
                f.write_str(" | ")?;
                wrap(f, r, 2)
            }
            Formula::Implies(l, r) => {
                wrap(f, l, 1)?;
                f.write_str(" => ")?;
                wrap(f, r, 0)
            }
        }
    }
}

struct TextParser {
    chars: Vec<char>,
    pos: usize,
}

impl TextParser {
    fn new(src: &str) -> Self {
        TextParser {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> FolError {
        FolError::Syntax {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars[self.pos.min(self.chars.len())..]
            .iter()
            .take(n)
            .copied()
            .eq(s.chars())
        {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, FolError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<Atom, FolError> {
        let col = self.pos;
        let pred = self.ident()?;
        let mut args = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                let t = self.ident()?;
                args.push(Term::parse(&t)?);
                if self.eat(")") {
                    break;
                }
                if !self.eat(",") {
                    return Err(self.error("expected `,` or `)`"));
                }
            }
        }
        Atom::new(&pred, args).map_err(|e| FolError::Syntax {
            column: col + 1,
            message: e.to_string(),
        })
    }

    fn implication(&mut self) -> Result<Formula, FolError> {
        let lhs = self.disjunction()?;
        if self.eat("=>") {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FolError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            let r = self.conjunction()?;
            f = Formula::Or(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, FolError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            let r = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FolError> {
        if self.eat("!") {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let f = self.implication()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(f);
        }
        Ok(Formula::Atomic(self.atom()?))
    }
}

/// Predicate → arity table shared by a clause set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `atom`'s arity; on a mismatch returns the previously seen arity.
    pub fn observe(&mut self, atom: &Atom) -> Result<(), usize> {
        match self.arities.get(&atom.predicate) {
            Some(&n) if n != atom.arity() => Err(n),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(atom.predicate.clone(), atom.arity());
                Ok(())
            }
        }
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.arities.get(predicate).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> Atom {
        Atom::parse(text).unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::from_pairs(pairs.iter().map(|(v, t)| (*v, Term::parse(t).unwrap()))).unwrap()
    }

    #[test]
    fn case_decides_variant() {
        assert_eq!(Term::parse("Faucet1").unwrap(), Term::Constant("Faucet1".into()));
        assert_eq!(Term::parse("x").unwrap(), Term::Variable("x".into()));
        assert!(Term::parse("1x").is_err());
        assert!(Term::constant("faucet").is_err());
        assert!(Term::variable("Pipe").is_err());
    }

    #[test]
    fn atom_text_ignores_whitespace() {
        let atom = a(" hold ( Faucet1 , High ) ");
        assert_eq!(atom.to_string(), "hold(Faucet1,High)");
        assert_eq!(a("p").arity(), 0);
        assert_eq!(a("p()"), a("p"));
        assert!(Atom::parse("Hold(x)").is_err());
        assert!(Atom::parse("hold(x,").is_err());
        assert!(Atom::parse("hold(x) y").is_err());
    }

    #[test]
    fn apply_substitution_examples() {
        let s = subst(&[("x", "Faucet1")]);
        assert_eq!(apply_substitution(&a("hold(x,High)"), &s), a("hold(Faucet1,High)"));
        assert_eq!(
            apply_substitution(&a("hold(Faucet1,High)"), &Substitution::new()),
            a("hold(Faucet1,High)")
        );
        let s = subst(&[("x", "Faucet1"), ("y", "Pipe1")]);
        assert_eq!(apply_substitution(&a("flow(x,y)"), &s), a("flow(Faucet1,Pipe1)"));
    }

    #[test]
    fn unify_examples() {
        assert_eq!(
            unify(&a("hold(x,High)"), &a("hold(Faucet1,High)")),
            Some(subst(&[("x", "Faucet1")]))
        );
        assert_eq!(unify(&a("hold(x,High)"), &a("hold(Faucet1,Low)")), None);
        assert_eq!(
            unify(&a("influencer(x,y)"), &a("influencer(Faucet1,Pipe1)")),
            Some(subst(&[("x", "Faucet1"), ("y", "Pipe1")]))
        );
        assert_eq!(unify(&a("p(x)"), &a("q(x)")), None);
        assert_eq!(unify(&a("p(x)"), &a("p(x,y)")), None);
    }

    #[test]
    fn unify_variable_chains_stay_idempotent() {
        let s = unify(&a("p(x,y,x)"), &a("p(y,z,A)")).unwrap();
        for (_, t) in s.iter() {
            assert_eq!(t, &Term::Constant("A".into()));
        }
        let l = a("p(x,y,x)").apply(&s);
        assert_eq!(l, a("p(y,z,A)").apply(&s));
        assert_eq!(l.apply(&s), l);
    }

    #[test]
    fn bind_rejects_constant_clash() {
        let mut s = subst(&[("x", "A")]);
        assert!(!s.bind("x", &Term::Constant("B".into())));
        assert_eq!(s, subst(&[("x", "A")]));
    }

    #[test]
    fn rename_apart_examples() {
        let r = HornRule::new(
            "r",
            vec![a("source(x)"), a("hold(x,High)")],
            a("hold(y,High)"),
        );
        assert!(matches!(r, Err(FolError::NotRangeRestricted { .. })));

        let r = HornRule::new(
            "r",
            vec![a("flow(x,y)"), a("hold(x,High)")],
            a("hold(y,High)"),
        )
        .unwrap();
        let r1 = r.rename_apart("1");
        assert_eq!(r1.to_string(), "hold(y_1,High) :- flow(x_1,y_1), hold(x_1,High)");
        let r2 = r.rename_apart("2");
        assert!(r1.variables().is_disjoint(&r2.variables()));

        let ground = HornRule::new("g", vec![a("p(A)")], a("q(A)")).unwrap();
        assert_eq!(ground.rename_apart("9"), ground);
    }

    #[test]
    fn formula_round_trip_and_horn_check() {
        let f = Formula::parse("hold(x,High) => hold(y,Low)").unwrap();
        assert_eq!(f.to_string(), "hold(x,High) => hold(y,Low)");
        // unbound consequent variable
        assert!(matches!(
            HornRule::from_formula("f", &f),
            Err(FolError::NotRangeRestricted { .. })
        ));

        let f = Formula::parse("hold(Faucet1,High) | hold(Faucet1,Low)").unwrap();
        assert!(matches!(HornRule::from_formula("f", &f), Err(FolError::NonHorn(_))));

        let f = Formula::parse("source(x) & !hold(x,No) => hold(x,High)").unwrap();
        assert!(matches!(HornRule::from_formula("f", &f), Err(FolError::NonHorn(_))));

        let f = Formula::parse("source(x) & transport(y) & flow(x,y) & hold(x,High) => hold(y,High)")
            .unwrap();
        let r = HornRule::from_formula("h", &f).unwrap();
        assert_eq!(r.antecedents.len(), 4);
        assert_eq!(r.to_formula(), f);
        assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);

        let nested = Formula::parse("(a | b) & !(c => d)").unwrap();
        assert_eq!(Formula::parse(&nested.to_string()).unwrap(), nested);
    }

    #[test]
    fn signature_detects_arity_clash() {
        let mut sig = Signature::new();
        sig.observe(&a("hold(A,B)")).unwrap();
        assert_eq!(sig.observe(&a("hold(A)")), Err(2));
        assert_eq!(sig.arity("hold"), Some(2));
    }
}
