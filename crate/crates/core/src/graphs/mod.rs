//! Finite graphs labeled over the rose: Stallings folding, cores, subgroup
//! graphs, membership and spanning-tree bases.
//!
//! Edges are stored positively oriented; walking an edge backwards reads the
//! inverse letter. Vertex and edge ids are stable: deleting a cell leaves a
//! tombstone, so ids held by callers (for example membership flags on graph
//! triples) stay valid across folds.

mod canonical;
mod dot;
mod fold;

use std::collections::VecDeque;

use thiserror::Error;

use crate::words::{Letter, Word, WordError};

pub use canonical::CanonicalForm;
pub use dot::{dot_graph, DotStyle};
pub use fold::{FoldOrder, FoldRecord, FoldTrace};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edges {0} and {1} do not form a foldable pair")]
    NotFoldable(EdgeId, EdgeId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no basepoint")]
    NoBasepoint,
    #[error("graph is not immersed at vertex {0}")]
    NotImmersed(VertexId),
    #[error("no live edge {0}")]
    NoEdge(EdgeId),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub origin: VertexId,
    pub terminus: VertexId,
    pub label: u16,
}

/// An edge traversed in one of its two directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn reversed(self) -> OrientedEdge {
        OrientedEdge { edge: self.edge, forward: !self.forward }
    }
}

/// A finite graph with a combinatorial map to the rose of rank `rank`,
/// recorded as a generator label on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    rank: usize,
    vertices: Vec<bool>,
    edges: Vec<Option<Edge>>,
    basepoint: Option<VertexId>,
}

impl LabeledGraph {
    pub fn new(rank: usize) -> LabeledGraph {
        LabeledGraph { rank, vertices: Vec::new(), edges: Vec::new(), basepoint: None }
    }

    /// A single basepoint vertex: the graph of the trivial subgroup.
    pub fn point(rank: usize) -> LabeledGraph {
        let mut g = LabeledGraph::new(rank);
        let v = g.add_vertex();
        g.basepoint = Some(v);
        g
    }

    pub fn rank_of_alphabet(&self) -> usize {
        self.rank
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertices.push(true);
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, origin: VertexId, terminus: VertexId, label: usize) -> EdgeId {
        assert!(label < self.rank, "label {label} outside alphabet of rank {}", self.rank);
        assert!(self.has_vertex(origin) && self.has_vertex(terminus), "dangling edge");
        self.edges.push(Some(Edge { origin, terminus, label: label as u16 }));
        self.edges.len() - 1
    }

    /// Adds an edge reading `letter` from `from` to `to`.
    pub fn add_letter_edge(&mut self, from: VertexId, to: VertexId, letter: Letter) -> EdgeId {
        if letter.inverse {
            self.add_edge(to, from, letter.index())
        } else {
            self.add_edge(from, to, letter.index())
        }
    }

    pub fn basepoint(&self) -> Option<VertexId> {
        self.basepoint
    }

    pub fn set_basepoint(&mut self, v: Option<VertexId>) {
        self.basepoint = v;
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.get(v).copied().unwrap_or(false)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(e).and_then(|x| x.as_ref())
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().enumerate().filter(|(_, a)| **a).map(|(i, _)| i)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_some()).map(|(i, _)| i)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|a| **a).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }

    /// Upper bound (exclusive) on vertex ids ever issued.
    pub fn vertex_capacity(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn origin(&self, oe: OrientedEdge) -> VertexId {
        let e = self.edges[oe.edge].expect("live edge");
        if oe.forward { e.origin } else { e.terminus }
    }

    pub fn terminus(&self, oe: OrientedEdge) -> VertexId {
        let e = self.edges[oe.edge].expect("live edge");
        if oe.forward { e.terminus } else { e.origin }
    }

    pub fn letter(&self, oe: OrientedEdge) -> Letter {
        let e = self.edges[oe.edge].expect("live edge");
        Letter::new(e.label as usize, !oe.forward)
    }

    /// Oriented edges leaving `v`, one entry per end (a loop appears twice).
    pub fn outgoing(&self, v: VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (id, e) in self.edges() {
            if e.origin == v {
                out.push(OrientedEdge { edge: id, forward: true });
            }
            if e.terminus == v {
                out.push(OrientedEdge { edge: id, forward: false });
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.edges()
            .map(|(_, e)| usize::from(e.origin == v) + usize::from(e.terminus == v))
            .sum()
    }

    pub(crate) fn remove_edge(&mut self, e: EdgeId) {
        self.edges[e] = None;
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        debug_assert!(self.edges().all(|(_, e)| e.origin != v && e.terminus != v));
        self.vertices[v] = false;
        if self.basepoint == Some(v) {
            self.basepoint = None;
        }
    }

    /// Keeps only the vertices and edges selected by the masks. Masks are
    /// indexed by id; an edge survives only if both its ends survive.
    pub fn restricted(&self, keep_vertex: &[bool], keep_edge: &[bool]) -> LabeledGraph {
        let mut g = self.clone();
        for v in 0..g.vertices.len() {
            if !keep_vertex.get(v).copied().unwrap_or(false) {
                g.vertices[v] = false;
            }
        }
        for e in 0..g.edges.len() {
            if let Some(edge) = g.edges[e] {
                let keep = keep_edge.get(e).copied().unwrap_or(false)
                    && g.vertices[edge.origin]
                    && g.vertices[edge.terminus];
                if !keep {
                    g.edges[e] = None;
                }
            }
        }
        if let Some(b) = g.basepoint {
            if !g.vertices[b] {
                g.basepoint = None;
            }
        }
        g
    }

    /// Renumbers cells consecutively. Returns the new graph and the maps from
    /// old vertex and edge ids to new ones.
    pub fn compacted(&self) -> (LabeledGraph, Vec<Option<VertexId>>, Vec<Option<EdgeId>>) {
        let mut vmap = vec![None; self.vertices.len()];
        let mut g = LabeledGraph::new(self.rank);
        for v in self.vertex_ids() {
            vmap[v] = Some(g.add_vertex());
        }
        let mut emap = vec![None; self.edges.len()];
        for (id, e) in self.edges() {
            emap[id] = Some(g.add_edge(vmap[e.origin].unwrap(), vmap[e.terminus].unwrap(), e.label as usize));
        }
        g.basepoint = self.basepoint.and_then(|b| vmap[b]);
        (g, vmap, emap)
    }

    /// Vertices reachable from `start`.
    pub fn component_of(&self, start: VertexId) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &(_, oe) in &adj[v] {
                let t = self.terminus(oe);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.vertex_ids().next() {
            None => false,
            Some(v) => {
                let seen = self.component_of(v);
                self.vertex_ids().all(|u| seen[u])
            }
        }
    }

    /// Per-vertex list of (letter, oriented edge) leaving the vertex, sorted.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(Letter, OrientedEdge)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (id, e) in self.edges() {
            let fwd = OrientedEdge { edge: id, forward: true };
            adj[e.origin].push((self.letter(fwd), fwd));
            adj[e.terminus].push((self.letter(fwd.reversed()), fwd.reversed()));
        }
        for list in &mut adj {
            list.sort();
        }
        adj
    }

    /// The first vertex at which two edge ends carry the same letter.
    pub fn first_clash(&self) -> Option<(OrientedEdge, OrientedEdge)> {
        let adj = self.adjacency();
        for list in adj.iter() {
            for pair in list.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Some((pair[0].1, pair[1].1));
                }
            }
        }
        None
    }

    /// Locally injective labeling: no vertex has two edge ends with the same
    /// letter.
    pub fn is_immersed(&self) -> bool {
        self.first_clash().is_none()
    }

    /// `|E| - |V| + 1` for a connected graph.
    pub fn rank(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.edge_count() + 1 - self.vertex_count())
    }

    /// Folds every label clash until the graph immerses.
    pub fn fold_to_immersion(&self) -> (LabeledGraph, FoldTrace) {
        self.fold_to_immersion_with(&mut FoldOrder::Lowest)
    }

    pub fn fold_to_immersion_with(&self, order: &mut FoldOrder) -> (LabeledGraph, FoldTrace) {
        fold::fold_all(self.clone(), order)
    }

    /// Identifies two edges sharing an origin (in one of the two
    /// orientations) and carrying the same label, together with their far
    /// endpoints.
    pub fn fold_once(&mut self, e1: EdgeId, e2: EdgeId) -> Result<FoldRecord, GraphError> {
        let pair = self.foldable_orientation(e1, e2)?;
        Ok(self.fold_oriented(pair.0, pair.1))
    }

    pub fn foldable_orientation(&self, e1: EdgeId, e2: EdgeId) -> Result<(OrientedEdge, OrientedEdge), GraphError> {
        let (a, b) = match (self.edge(e1), self.edge(e2)) {
            (Some(a), Some(b)) => (*a, *b),
            (None, _) => return Err(GraphError::NoEdge(e1)),
            (_, None) => return Err(GraphError::NoEdge(e2)),
        };
        if e1 == e2 || a.label != b.label {
            return Err(GraphError::NotFoldable(e1, e2));
        }
        if a.origin == b.origin {
            Ok((OrientedEdge { edge: e1, forward: true }, OrientedEdge { edge: e2, forward: true }))
        } else if a.terminus == b.terminus {
            Ok((OrientedEdge { edge: e1, forward: false }, OrientedEdge { edge: e2, forward: false }))
        } else {
            Err(GraphError::NotFoldable(e1, e2))
        }
    }

    /// Folds a pair of oriented edges with a common origin and letter. The
    /// first edge survives; of the two far endpoints the basepoint survives,
    /// otherwise the lower id.
    pub fn fold_oriented(&mut self, keep: OrientedEdge, remove: OrientedEdge) -> FoldRecord {
        debug_assert_eq!(self.origin(keep), self.origin(remove));
        debug_assert_eq!(self.letter(keep), self.letter(remove));
        let w1 = self.terminus(keep);
        let w2 = self.terminus(remove);
        self.remove_edge(remove.edge);
        let merged = if w1 != w2 {
            let (survivor, loser) = survivor_of(w1, w2, self.basepoint);
            for e in self.edges.iter_mut().flatten() {
                if e.origin == loser {
                    e.origin = survivor;
                }
                if e.terminus == loser {
                    e.terminus = survivor;
                }
            }
            self.vertices[loser] = false;
            Some((survivor, loser))
        } else {
            None
        };
        FoldRecord { kept_edge: keep.edge, removed_edge: remove.edge, merged }
    }

    /// Replays a trace recorded by [`LabeledGraph::fold_to_immersion`].
    pub fn replay(&mut self, trace: &FoldTrace) -> Result<(), GraphError> {
        for r in &trace.records {
            self.fold_once(r.kept_edge, r.removed_edge)?;
        }
        Ok(())
    }

    fn prune(&mut self, keep_basepoint: bool) {
        let mut valence = vec![0usize; self.vertices.len()];
        let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); self.vertices.len()];
        for (id, e) in self.edges() {
            valence[e.origin] += 1;
            valence[e.terminus] += 1;
            incident[e.origin].push(id);
            if e.terminus != e.origin {
                incident[e.terminus].push(id);
            }
        }
        let protected = |v: VertexId, bp: Option<VertexId>| keep_basepoint && bp == Some(v);
        let mut queue: VecDeque<VertexId> =
            self.vertex_ids().filter(|&v| valence[v] <= 1 && !protected(v, self.basepoint)).collect();
        while let Some(v) = queue.pop_front() {
            if !self.vertices[v] || valence[v] > 1 || protected(v, self.basepoint) {
                continue;
            }
            for &e in &incident[v] {
                if let Some(edge) = self.edges[e] {
                    let other = if edge.origin == v { edge.terminus } else { edge.origin };
                    self.edges[e] = None;
                    valence[v] -= 1;
                    valence[other] -= 1;
                    if valence[other] <= 1 && !protected(other, self.basepoint) {
                        queue.push_back(other);
                    }
                }
            }
            self.remove_vertex(v);
        }
    }

    /// Union of reduced closed paths at the basepoint: the component of the
    /// basepoint with hanging trees removed. The basepoint always survives.
    pub fn pointed_core(&self) -> Result<LabeledGraph, GraphError> {
        let b = self.basepoint.ok_or(GraphError::NoBasepoint)?;
        let comp = self.component_of(b);
        let keep_e: Vec<bool> = (0..self.edges.len())
            .map(|e| self.edge(e).is_some_and(|x| comp[x.origin]))
            .collect();
        let mut g = self.restricted(&comp, &keep_e);
        g.prune(true);
        Ok(g)
    }

    /// Union of all reduced cycles; may be empty. The basepoint is dropped if
    /// it does not lie on a cycle.
    pub fn core(&self) -> LabeledGraph {
        let mut g = self.clone();
        g.prune(false);
        g
    }

    /// Disjoint union with the two basepoints identified. Returns the maps
    /// from `other`'s vertex and edge ids into the result.
    pub fn wedge_in(&mut self, other: &LabeledGraph) -> (Vec<Option<VertexId>>, Vec<Option<EdgeId>>) {
        assert_eq!(self.rank, other.rank, "wedge of graphs over different roses");
        let b = self.basepoint.expect("wedge needs a pointed graph");
        let ob = other.basepoint.expect("wedge needs a pointed graph");
        let mut vmap = vec![None; other.vertices.len()];
        for v in other.vertex_ids() {
            vmap[v] = Some(if v == ob { b } else { self.add_vertex() });
        }
        let mut emap = vec![None; other.edges.len()];
        for (id, e) in other.edges() {
            emap[id] = Some(self.add_edge(vmap[e.origin].unwrap(), vmap[e.terminus].unwrap(), e.label as usize));
        }
        (vmap, emap)
    }

    pub fn wedge(&self, other: &LabeledGraph) -> LabeledGraph {
        let mut g = self.clone();
        g.wedge_in(other);
        g
    }

    /// Reads the word along `path` starting at `start`.
    pub fn path_word(&self, path: &[OrientedEdge]) -> Word {
        Word::from_letters(path.iter().map(|&oe| self.letter(oe)))
    }

    /// Follows `w` from `start` in an immersed graph.
    pub fn trace(&self, start: VertexId, w: &Word) -> Option<VertexId> {
        let adj = self.adjacency();
        let mut v = start;
        for &l in w.letters() {
            let list = &adj[v];
            let i = list.binary_search_by(|(x, _)| x.cmp(&l)).ok()?;
            v = self.terminus(list[i].1);
        }
        Some(v)
    }

    /// Breadth-first spanning tree from the basepoint over the selected
    /// cells, visiting letters in order. Returns the parent edge of each
    /// vertex (oriented away from the root) in discovery order.
    pub(crate) fn bfs_tree(&self, root: VertexId) -> (Vec<Option<OrientedEdge>>, Vec<VertexId>) {
        let adj = self.adjacency();
        let mut parent = vec![None; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        let mut order = vec![root];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(_, oe) in &adj[v] {
                let t = self.terminus(oe);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some(oe);
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        (parent, order)
    }

    /// Word read along the tree path from the root to `v`.
    pub(crate) fn tree_word(&self, parent: &[Option<OrientedEdge>], v: VertexId) -> Word {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(oe) = parent[cur] {
            path.push(oe);
            cur = self.origin(oe);
        }
        path.reverse();
        self.path_word(&path)
    }

    /// The loop word through a non-tree edge.
    pub(crate) fn edge_loop_word(&self, parent: &[Option<OrientedEdge>], e: EdgeId) -> Word {
        let edge = self.edges[e].expect("live edge");
        let to_origin = self.tree_word(parent, edge.origin);
        let from_terminus = self.tree_word(parent, edge.terminus).inverse();
        to_origin
            .concat(&Word::generator(edge.label as usize))
            .concat(&from_terminus)
    }

    /// One loop word per non-tree edge of a breadth-first spanning tree,
    /// in edge-id order. For an immersed pointed core graph this is a free
    /// basis of the subgroup it represents.
    pub fn basis(&self) -> Result<Vec<Word>, GraphError> {
        let b = self.basepoint.ok_or(GraphError::NoBasepoint)?;
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let (parent, _) = self.bfs_tree(b);
        let tree: Vec<bool> = {
            let mut t = vec![false; self.edges.len()];
            for oe in parent.iter().flatten() {
                t[oe.edge] = true;
            }
            t
        };
        Ok(self.edge_ids().filter(|&e| !tree[e]).map(|e| self.edge_loop_word(&parent, e)).collect())
    }

    /// Canonical encoding of an immersed connected pointed graph.
    pub fn canonical_form(&self) -> Result<CanonicalForm, GraphError> {
        canonical::canonical_form(self)
    }

    pub fn dot(&self) -> String {
        dot_graph(self, &DotStyle::default())
    }
}

pub(crate) fn survivor_of(w1: VertexId, w2: VertexId, basepoint: Option<VertexId>) -> (VertexId, VertexId) {
    if basepoint == Some(w2) || (basepoint != Some(w1) && w2 < w1) {
        (w2, w1)
    } else {
        (w1, w2)
    }
}

/// Wedge of subdivided loops at a common basepoint, one loop spelling each
/// word. Identity words contribute nothing.
pub fn bouquet(rank: usize, words: &[Word]) -> Result<LabeledGraph, GraphError> {
    let mut g = LabeledGraph::point(rank);
    let b = g.basepoint.unwrap();
    for w in words {
        w.check_alphabet(rank)?;
        let letters = w.letters();
        let mut cur = b;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { b } else { g.add_vertex() };
            g.add_letter_edge(cur, next, l);
            cur = next;
        }
    }
    Ok(g)
}

/// The pointed subgroup graph of a finitely generated subgroup: an immersed
/// pointed core graph, numbered canonically. Equality is subgroup equality.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    form: CanonicalForm,
    graph: LabeledGraph,
}

impl PartialEq for SubgroupGraph {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
    }
}

impl Eq for SubgroupGraph {}

impl std::hash::Hash for SubgroupGraph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.form.hash(state);
    }
}

impl SubgroupGraph {
    /// Folds `g` to an immersion and takes the pointed core.
    pub fn from_graph(g: &LabeledGraph) -> Result<SubgroupGraph, GraphError> {
        let (folded, _) = g.fold_to_immersion();
        SubgroupGraph::from_immersed(&folded)
    }

    pub fn from_immersed(g: &LabeledGraph) -> Result<SubgroupGraph, GraphError> {
        let core = g.pointed_core()?;
        let form = core.canonical_form()?;
        let graph = form.to_graph(g.rank_of_alphabet());
        Ok(SubgroupGraph { form, graph })
    }

    pub fn generated_by(rank: usize, words: &[Word]) -> Result<SubgroupGraph, GraphError> {
        SubgroupGraph::from_graph(&bouquet(rank, words)?)
    }

    pub fn trivial(rank: usize) -> SubgroupGraph {
        let graph = LabeledGraph::point(rank);
        let form = graph.canonical_form().expect("point is canonical");
        SubgroupGraph { form, graph }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn canonical(&self) -> &CanonicalForm {
        &self.form
    }

    pub fn contains(&self, w: &Word) -> bool {
        membership(&self.graph, w)
    }

    pub fn contains_all(&self, words: &[Word]) -> bool {
        let adj = self.graph.adjacency();
        words.iter().all(|w| trace_with(&self.graph, &adj, w) == self.graph.basepoint)
    }

    pub fn rank(&self) -> usize {
        self.graph.rank().expect("subgroup graphs are connected")
    }

    pub fn basis(&self) -> Vec<Word> {
        self.graph.basis().expect("subgroup graphs are pointed and connected")
    }

    /// Subgroup equality by mutual membership of bases.
    pub fn same_subgroup(&self, other: &SubgroupGraph) -> bool {
        self.contains_all(&other.basis()) && other.contains_all(&self.basis())
    }

    pub fn is_subgroup_of(&self, other: &SubgroupGraph) -> bool {
        other.contains_all(&self.basis())
    }
}

fn trace_with(g: &LabeledGraph, adj: &[Vec<(Letter, OrientedEdge)>], w: &Word) -> Option<VertexId> {
    let mut v = g.basepoint?;
    for &l in w.letters() {
        let list = &adj[v];
        let i = list.binary_search_by(|(x, _)| x.cmp(&l)).ok()?;
        v = g.terminus(list[i].1);
    }
    Some(v)
}

/// `Γ(L)`: the immersed pointed core graph of `⟨L⟩`.
pub fn subgroup_graph(rank: usize, words: &[Word]) -> Result<LabeledGraph, GraphError> {
    Ok(SubgroupGraph::generated_by(rank, words)?.graph)
}

/// Whether `w` reads a closed path at the basepoint of an immersed graph.
pub fn membership(g: &LabeledGraph, w: &Word) -> bool {
    match g.basepoint() {
        Some(b) => g.trace(b, w) == Some(b),
        None => false,
    }
}

/// Rank of the subgroup generated by `words`.
pub fn subgroup_rank(rank: usize, words: &[Word]) -> Result<usize, GraphError> {
    let (folded, _) = bouquet(rank, words)?.fold_to_immersion();
    folded.rank()
}
