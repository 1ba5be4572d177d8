use std::collections::VecDeque;

use super::{GraphError, LabeledGraph};

/// Renumbering-invariant encoding of an immersed, connected, pointed graph.
///
/// Vertices are numbered in breadth-first order from the basepoint, visiting
/// edge ends in letter order (`a, A, b, B, …`); edges are listed in the
/// order they are first seen. Because the graph is immersed, each visit is
/// forced, so two graphs have equal forms iff they are isomorphic as
/// labeled pointed graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertex_count: usize,
    /// `(origin, terminus, label)` in canonical numbering.
    pub edges: Vec<(usize, usize, u16)>,
}

impl CanonicalForm {
    /// Rebuilds a graph whose ids are the canonical numbers; vertex 0 is the
    /// basepoint.
    pub fn to_graph(&self, rank: usize) -> LabeledGraph {
        let mut g = LabeledGraph::new(rank);
        for _ in 0..self.vertex_count {
            g.add_vertex();
        }
        for &(o, t, l) in &self.edges {
            g.add_edge(o, t, l as usize);
        }
        g.set_basepoint(Some(0));
        g
    }
}

pub(super) fn canonical_form(g: &LabeledGraph) -> Result<CanonicalForm, GraphError> {
    let b = g.basepoint().ok_or(GraphError::NoBasepoint)?;
    let adj = g.adjacency();
    for v in g.vertex_ids() {
        if adj[v].windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(GraphError::NotImmersed(v));
        }
    }
    let mut number = vec![usize::MAX; g.vertex_capacity()];
    let mut seen_edge = vec![false; g.edge_capacity()];
    let mut edges = Vec::with_capacity(g.edge_count());
    number[b] = 0;
    let mut next = 1;
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for &(_, oe) in &adj[v] {
            let t = g.terminus(oe);
            if number[t] == usize::MAX {
                number[t] = next;
                next += 1;
                queue.push_back(t);
            }
            if !seen_edge[oe.edge] {
                seen_edge[oe.edge] = true;
                let e = g.edge(oe.edge).expect("live edge");
                edges.push((number[e.origin], number[e.terminus], e.label));
            }
        }
    }
    if next != g.vertex_count() {
        return Err(GraphError::Disconnected);
    }
    Ok(CanonicalForm { vertex_count: next, edges })
}
