//! Graphviz rendering of plan graphs.
//!
//! Each hyperedge gets a small point node labelled with the rule name;
//! premises point into it and it points at the conclusion. Arrows follow
//! the direction of implication, the reverse of the search.

use std::fmt::Write;

use super::{Justification, NodeKind, PlanGraph};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Goal => "doublecircle",
        NodeKind::Fact => "box",
        NodeKind::Action => "hexagon",
        NodeKind::Subgoal => "ellipse",
    }
}

pub(crate) fn to_dot(g: &PlanGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph plan {\n");
    out.push_str("    rankdir=BT;\n");
    out.push_str("    node [fontname=\"Helvetica\"];\n");
    for n in &g.nodes {
        let _ = writeln!(
            out,
            "    n{} [label=\"{}\", shape={}];",
            n.id,
            escape(&n.atom.to_string()),
            shape(n.kind)
        );
    }
    for (i, h) in g.hyperedges.iter().enumerate() {
        let style = match h.justification {
            Justification::Initial => "dotted",
            Justification::Propagation => "solid",
            Justification::Action => "bold",
        };
        let _ = writeln!(
            out,
            "    h{i} [shape=point, xlabel=\"{}\"];",
            escape(&h.rule)
        );
        for p in &h.premises {
            let _ = writeln!(out, "    n{p} -> h{i} [arrowhead=none, style={style}];");
        }
        let _ = writeln!(out, "    h{i} -> n{} [style={style}];", h.conclusion);
    }
    if !g.action_order.is_empty() {
        let order: Vec<String> = g.action_order.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(
            out,
            "    label=\"actions: {}\";",
            escape(&order.join(", "))
        );
    }
    out.push_str("}\n");
    out
}
