//! MFM models: labelled directed graphs of plant functions.
//!
//! Vertices carry a function type and at most one qualitative state;
//! edges carry a relation type and optionally a flow in their own
//! direction. Labels come from an open [`Taxonomy`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fol::{is_constant_name, is_lower_name};

macro_rules! label_type {
    ($(#[$meta:meta])* $name:ident, $check:path, $rule:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(label: &str) -> Result<Self, ModelError> {
                if $check(label) {
                    Ok(Self(label.to_string()))
                } else {
                    Err(ModelError::InvalidLabel {
                        kind: stringify!($name),
                        label: label.to_string(),
                        rule: $rule,
                    })
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

label_type!(
    /// Function label of a vertex, e.g. `source`.
    FunctionType,
    is_lower_name,
    "[a-z][A-Za-z0-9_]*"
);
label_type!(
    /// Relation label of an edge, e.g. `influencer`.
    RelationType,
    is_lower_name,
    "[a-z][A-Za-z0-9_]*"
);
label_type!(
    /// Qualitative state such as `High`; distinct labels are mutually
    /// exclusive for one vertex at one time point.
    StateLabel,
    is_constant_name,
    "[A-Z][A-Za-z0-9_]*"
);

pub const BUILTIN_FUNCTIONS: &[&str] = &["source", "transport", "sink", "storage", "balance", "barrier"];
pub const BUILTIN_RELATIONS: &[&str] = &["influencer", "participant"];
pub const BUILTIN_STATES: &[&str] = &["High", "Low", "No"];

/// Set of recognised function and relation labels. Starts with the
/// built-ins and accepts user registrations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    functions: BTreeSet<String>,
    relations: BTreeSet<String>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy {
            functions: BUILTIN_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
            relations: BUILTIN_RELATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Taxonomy {
    pub fn register_function(&mut self, label: &str) -> Result<FunctionType, ModelError> {
        let f = FunctionType::new(label)?;
        self.functions.insert(label.to_string());
        Ok(f)
    }

    pub fn register_relation(&mut self, label: &str) -> Result<RelationType, ModelError> {
        let r = RelationType::new(label)?;
        self.relations.insert(label.to_string());
        Ok(r)
    }

    pub fn has_function(&self, f: &FunctionType) -> bool {
        self.functions.contains(f.as_str())
    }

    pub fn has_relation(&self, r: &RelationType) -> bool {
        self.relations.contains(r.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub name: String,
    pub function: FunctionType,
    pub state: Option<StateLabel>,
}

impl Vertex {
    pub fn new(name: &str, function: &str, state: Option<&str>) -> Result<Self, ModelError> {
        Ok(Vertex {
            name: name.to_string(),
            function: FunctionType::new(function)?,
            state: state.map(StateLabel::new).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub relation: RelationType,
    /// A flow runs `from → to` along this edge.
    pub carries_flow: bool,
}

impl Edge {
    pub fn new(from: &str, to: &str, relation: &str, carries_flow: bool) -> Result<Self, ModelError> {
        Ok(Edge {
            from: from.to_string(),
            to: to.to_string(),
            relation: RelationType::new(relation)?,
            carries_flow,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid {kind} `{label}`: must match {rule}")]
    InvalidLabel {
        kind: &'static str,
        label: String,
        rule: &'static str,
    },
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertexName(String),
    #[error("edge {from} -> {to} names unknown vertex `{missing}`")]
    UnknownEndpoint {
        from: String,
        to: String,
        missing: String,
    },
    #[error("duplicate edge {from} -> {to}: {relation}")]
    DuplicateEdge {
        from: String,
        to: String,
        relation: String,
    },
    #[error("edge {0} -> {0} is a self-loop")]
    SelfLoop(String),
}

/// A violated model invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diagnostic {
    InvalidVertexName(String),
    DuplicateVertexName(String),
    MultipleStates { vertex: String, states: Vec<String> },
    UnknownFunctionType { vertex: String, function: String },
    UnknownRelationType { from: String, to: String, relation: String },
    UnknownEndpoint { from: String, to: String, missing: String },
    SelfLoop(String),
    DuplicateEdge { from: String, to: String, relation: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::InvalidVertexName(v) => {
                write!(f, "invalid-vertex-name: `{v}` must be a capitalised identifier")
            }
            Diagnostic::DuplicateVertexName(v) => write!(f, "duplicate-vertex-name: `{v}`"),
            Diagnostic::MultipleStates { vertex, states } => {
                write!(f, "multiple-state: vertex `{vertex}` declares {}", states.join(", "))
            }
            Diagnostic::UnknownFunctionType { vertex, function } => {
                write!(f, "unknown-function-type: `{function}` on vertex `{vertex}`")
            }
            Diagnostic::UnknownRelationType { from, to, relation } => {
                write!(f, "unknown-relation-type: `{relation}` on edge {from} -> {to}")
            }
            Diagnostic::UnknownEndpoint { from, to, missing } => {
                write!(f, "unknown-endpoint: edge {from} -> {to} names missing vertex `{missing}`")
            }
            Diagnostic::SelfLoop(v) => write!(f, "self-loop: edge {v} -> {v}"),
            Diagnostic::DuplicateEdge { from, to, relation } => {
                write!(f, "duplicate-edge: {from} -> {to}: {relation}")
            }
        }
    }
}

/// An MFM model. Fields are public so that raw, possibly invalid models
/// can be assembled and checked with [`MfmModel::validate`]; the
/// `add_*` methods only ever produce valid models.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MfmModel {
    pub name: String,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl MfmModel {
    pub fn new(name: &str) -> Self {
        MfmModel {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn vertex(&self, name: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.name == name)
    }

    /// Add a vertex. On error the model is left unchanged.
    pub fn add_vertex(&mut self, v: Vertex) -> Result<&mut Self, ModelError> {
        if self.vertex(&v.name).is_some() {
            return Err(ModelError::DuplicateVertexName(v.name));
        }
        self.vertices.push(v);
        Ok(self)
    }

    /// Add an edge. On error the model is left unchanged.
    pub fn add_edge(&mut self, e: Edge) -> Result<&mut Self, ModelError> {
        for end in [&e.from, &e.to] {
            if self.vertex(end).is_none() {
                return Err(ModelError::UnknownEndpoint {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    missing: end.clone(),
                });
            }
        }
        if e.from == e.to {
            return Err(ModelError::SelfLoop(e.from));
        }
        if self
            .edges
            .iter()
            .any(|x| x.from == e.from && x.to == e.to && x.relation == e.relation)
        {
            return Err(ModelError::DuplicateEdge {
                from: e.from,
                to: e.to,
                relation: e.relation.to_string(),
            });
        }
        self.edges.push(e);
        Ok(self)
    }

    /// Check all plant-model invariants against the built-in taxonomy.
    pub fn validate(&self) -> Vec<Diagnostic> {
        self.validate_with(&Taxonomy::default())
    }

    pub fn validate_with(&self, taxonomy: &Taxonomy) -> Vec<Diagnostic> {
        let mut out = self.structural_diagnostics(taxonomy);
        for v in &self.vertices {
            if !is_constant_name(&v.name) {
                out.push(Diagnostic::InvalidVertexName(v.name.clone()));
            }
        }
        out
    }

    /// Invariants shared by plant models and rule patterns: everything
    /// except the vertex-name case rule.
    pub(crate) fn structural_diagnostics(&self, taxonomy: &Taxonomy) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut by_name: BTreeMap<&str, Vec<&Vertex>> = BTreeMap::new();
        for v in &self.vertices {
            by_name.entry(&v.name).or_default().push(v);
            if !taxonomy.has_function(&v.function) {
                out.push(Diagnostic::UnknownFunctionType {
                    vertex: v.name.clone(),
                    function: v.function.to_string(),
                });
            }
        }
        for (name, decls) in &by_name {
            if decls.len() < 2 {
                continue;
            }
            let states: BTreeSet<&str> = decls
                .iter()
                .filter_map(|v| v.state.as_ref().map(StateLabel::as_str))
                .collect();
            if states.len() > 1 {
                out.push(Diagnostic::MultipleStates {
                    vertex: name.to_string(),
                    states: states.into_iter().map(str::to_string).collect(),
                });
            } else {
                out.push(Diagnostic::DuplicateVertexName(name.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !by_name.contains_key(end.as_str()) {
                    out.push(Diagnostic::UnknownEndpoint {
                        from: e.from.clone(),
                        to: e.to.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if e.from == e.to {
                out.push(Diagnostic::SelfLoop(e.from.clone()));
            }
            if !taxonomy.has_relation(&e.relation) {
                out.push(Diagnostic::UnknownRelationType {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    relation: e.relation.to_string(),
                });
            }
            if !seen.insert((&e.from, &e.to, &e.relation)) {
                out.push(Diagnostic::DuplicateEdge {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    relation: e.relation.to_string(),
                });
            }
        }
        out
    }
}
