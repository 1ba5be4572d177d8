use std::fmt::Write;

use super::LabeledGraph;
use crate::words::Letter;

/// Extra attributes per cell, indexed by id. Missing entries get none.
#[derive(Debug, Clone, Default)]
pub struct DotStyle {
    pub name: Option<String>,
    pub vertex_attrs: Vec<Option<String>>,
    pub edge_attrs: Vec<Option<String>>,
}

/// Graphviz rendering: vertices `v<i>`, the basepoint drawn as a double
/// circle, edges `v<i> -> v<j> [label="<letter>"]`.
pub fn dot_graph(g: &LabeledGraph, style: &DotStyle) -> String {
    let mut out = String::new();
    let name = style.name.as_deref().unwrap_or("G");
    writeln!(out, "digraph {name} {{").unwrap();
    for v in g.vertex_ids() {
        let mut attrs = Vec::new();
        if g.basepoint() == Some(v) {
            attrs.push("shape=doublecircle".to_string());
        }
        if let Some(Some(extra)) = style.vertex_attrs.get(v) {
            attrs.push(extra.clone());
        }
        if attrs.is_empty() {
            writeln!(out, "  v{v};").unwrap();
        } else {
            writeln!(out, "  v{v} [{}];", attrs.join(", ")).unwrap();
        }
    }
    for (id, e) in g.edges() {
        let letter = Letter::positive(e.label as usize);
        match style.edge_attrs.get(id) {
            Some(Some(extra)) => {
                writeln!(out, "  v{} -> v{} [label=\"{letter}\", {extra}];", e.origin, e.terminus).unwrap()
            }
            _ => writeln!(out, "  v{} -> v{} [label=\"{letter}\"];", e.origin, e.terminus).unwrap(),
        }
    }
    out.push_str("}\n");
    out
}
