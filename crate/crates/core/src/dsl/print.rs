//! Canonical text rendering. Output reparses to an equal value.

use std::fmt;

use super::{ActionSource, Document, ProblemSource, RuleSource};
use crate::model::{Edge, MfmModel, Vertex};

fn write_vertex(f: &mut fmt::Formatter<'_>, indent: &str, v: &Vertex) -> fmt::Result {
    write!(f, "{indent}vertex {}: {}", v.name, v.function)?;
    if let Some(s) = &v.state {
        write!(f, " state {s}")?;
    }
    writeln!(f, ";")
}

fn write_edge(f: &mut fmt::Formatter<'_>, indent: &str, e: &Edge) -> fmt::Result {
    write!(f, "{indent}edge {} -> {}: {}", e.from, e.to, e.relation)?;
    if e.carries_flow {
        f.write_str(" flow")?;
    }
    writeln!(f, ";")
}

impl fmt::Display for MfmModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {} {{", self.name)?;
        for v in &self.vertices {
            write_vertex(f, "    ", v)?;
        }
        for e in &self.edges {
            write_edge(f, "    ", e)?;
        }
        writeln!(f, "}}")
    }
}

impl fmt::Display for RuleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule {} {{", self.name)?;
        writeln!(f, "    pattern {{")?;
        for v in &self.pattern.vertices {
            write_vertex(f, "        ", v)?;
        }
        for e in &self.pattern.edges {
            write_edge(f, "        ", e)?;
        }
        writeln!(f, "    }}")?;
        writeln!(f, "    cause {};", self.cause.to_atom())?;
        for e in &self.effects {
            writeln!(f, "    effect {};", e.to_atom())?;
        }
        writeln!(f, "}}")
    }
}

impl fmt::Display for ActionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "action {}({}) {{", self.action_name, self.params.join(", "))?;
        for p in &self.preconditions {
            writeln!(f, "    pre {p};")?;
        }
        writeln!(f, "    effect {};", self.effect)?;
        writeln!(f, "}}")
    }
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem {{")?;
        writeln!(f, "    model {};", self.model_ref)?;
        writeln!(f, "    goal {};", self.goal)?;
        writeln!(f, "    max_actions {};", self.max_actions)?;
        writeln!(f, "}}")
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if !std::mem::take(&mut first) {
                writeln!(f)?;
            }
            Ok::<(), fmt::Error>(())
        };
        for m in &self.models {
            sep(f)?;
            write!(f, "{m}")?;
        }
        for r in &self.rules {
            sep(f)?;
            write!(f, "{r}")?;
        }
        for a in &self.actions {
            sep(f)?;
            write!(f, "{a}")?;
        }
        for p in &self.problems {
            sep(f)?;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
