//! Graph pairs and graph triples over the rose.
//!
//! A triple `(Z, Y, X)` is stored as one labeled graph `Z` with an `X` and a
//! `Y` flag on every vertex and edge. `X∩Y` is the set of cells carrying both
//! flags. Folds act once on `Z` and the flags of identified cells are
//! unioned, so the three subgraphs never drift apart.
//!
//! Every constructor keeps `Z = X ∪ Y`: each live cell carries at least one
//! flag. [`GraphTriple::validate`] checks this together with connectivity.

use std::fmt;

use crate::error::{Error, Result};
use crate::graphs::{
    dot_graph, subgroup_graph, DotStyle, EdgeId, FoldRecord, LabeledGraph, SubgroupGraph, VertexId,
};
use crate::words::{Automorphism, Letter, Word};

/// Membership of one cell in `X` and `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct CellFlags {
    pub x: bool,
    pub y: bool,
}

impl CellFlags {
    pub const NONE: CellFlags = CellFlags { x: false, y: false };
    pub const X: CellFlags = CellFlags { x: true, y: false };
    pub const Y: CellFlags = CellFlags { x: false, y: true };
    pub const XY: CellFlags = CellFlags { x: true, y: true };

    pub fn union(self, other: CellFlags) -> CellFlags {
        CellFlags { x: self.x || other.x, y: self.y || other.y }
    }

    pub fn both(self) -> bool {
        self.x && self.y
    }

    pub fn is_in(self, which: Which) -> bool {
        match which {
            Which::X => self.x,
            Which::Y => self.y,
            Which::XY => self.x && self.y,
            Which::Z => true,
        }
    }

    /// `"XY"`, `"X"`, `"Y"` or `"Z"` (in neither).
    pub fn label(self) -> &'static str {
        match (self.x, self.y) {
            (true, true) => "XY",
            (true, false) => "X",
            (false, true) => "Y",
            (false, false) => "Z",
        }
    }
}

/// A subgraph selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    X,
    Y,
    XY,
    Z,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::X => "X",
            Which::Y => "Y",
            Which::XY => "X∩Y",
            Which::Z => "Z",
        })
    }
}

fn relative_rank_counts(z: (usize, usize), a: (usize, usize)) -> Result<usize> {
    // (|E_Z| - |E_A|) - (|V_Z| - |V_A|)
    let value = (z.1 as i64 - a.1 as i64) - (z.0 as i64 - a.0 as i64);
    usize::try_from(value).map_err(|_| Error::Structure(format!("negative relative rank {value}")))
}

/// Whether `outer# = ⟨inner#, ψ^direction(inner#)⟩`, by mutual membership.
pub fn is_invariant(
    outer: &SubgroupGraph,
    inner: &SubgroupGraph,
    psi: &Automorphism,
    direction: i64,
) -> Result<bool> {
    let basis = inner.basis();
    let mut gens = basis.clone();
    gens.extend(psi.apply_all(&basis, direction)?);
    let generated = SubgroupGraph::generated_by(psi.rank(), &gens)?;
    Ok(generated.same_subgroup(outer))
}

/// A graph `Z` with a connected pointed subgraph `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPair {
    z: LabeledGraph,
    in_x_vertex: Vec<bool>,
    in_x_edge: Vec<bool>,
}

impl GraphPair {
    pub fn new(z: LabeledGraph, in_x_vertex: Vec<bool>, in_x_edge: Vec<bool>) -> Result<GraphPair> {
        let p = GraphPair { z, in_x_vertex, in_x_edge };
        let b = p.z.basepoint().ok_or_else(|| Error::Structure("pair has no basepoint".into()))?;
        if !p.in_x_vertex.get(b).copied().unwrap_or(false) {
            return Err(Error::Structure("basepoint is not in X".into()));
        }
        if !p.z.is_connected() || !p.x().is_connected() {
            return Err(Error::Structure("pair is not connected".into()));
        }
        Ok(p)
    }

    pub fn z(&self) -> &LabeledGraph {
        &self.z
    }

    pub fn x(&self) -> LabeledGraph {
        self.z.restricted(&self.in_x_vertex, &self.in_x_edge)
    }

    pub fn relative_rank(&self) -> Result<usize> {
        let x = self.x();
        relative_rank_counts(
            (self.z.vertex_count(), self.z.edge_count()),
            (x.vertex_count(), x.edge_count()),
        )
    }

    /// `Z# = ⟨X#, ψ^direction(X#)⟩`.
    pub fn is_invariant_pair(&self, psi: &Automorphism, direction: i64) -> Result<bool> {
        let z = SubgroupGraph::from_graph(&self.z)?;
        let x = SubgroupGraph::from_graph(&self.x())?;
        is_invariant(&z, &x, psi, direction)
    }
}

/// A graph triple `(Z, Y, X)` with per-cell flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTriple {
    z: LabeledGraph,
    vertex_flags: Vec<CellFlags>,
    edge_flags: Vec<CellFlags>,
}

impl GraphTriple {
    /// Assembles and validates a triple. Flag vectors are indexed by id.
    pub fn from_parts(z: LabeledGraph, vertex_flags: Vec<CellFlags>, edge_flags: Vec<CellFlags>) -> Result<GraphTriple> {
        let mut t = GraphTriple { z, vertex_flags, edge_flags };
        t.vertex_flags.resize(t.z.vertex_capacity(), CellFlags::NONE);
        t.edge_flags.resize(t.z.edge_capacity(), CellFlags::NONE);
        t.validate()?;
        Ok(t)
    }

    /// `Z = X = Y = g`.
    pub fn uniform(g: LabeledGraph) -> Result<GraphTriple> {
        let v = vec![CellFlags::XY; g.vertex_capacity()];
        let e = vec![CellFlags::XY; g.edge_capacity()];
        GraphTriple::from_parts(g, v, e)
    }

    pub fn z(&self) -> &LabeledGraph {
        &self.z
    }

    pub fn alphabet_rank(&self) -> usize {
        self.z.rank_of_alphabet()
    }

    pub fn basepoint(&self) -> VertexId {
        self.z.basepoint().expect("validated triples are pointed")
    }

    pub fn vertex_flags(&self, v: VertexId) -> CellFlags {
        self.vertex_flags[v]
    }

    pub fn edge_flags(&self, e: EdgeId) -> CellFlags {
        self.edge_flags[e]
    }

    fn masks(&self, which: Which) -> (Vec<bool>, Vec<bool>) {
        let v = self.vertex_flags.iter().map(|f| f.is_in(which)).collect();
        let e = self.edge_flags.iter().map(|f| f.is_in(which)).collect();
        (v, e)
    }

    /// The selected subgraph, keeping `Z`'s ids.
    pub fn subgraph(&self, which: Which) -> LabeledGraph {
        if which == Which::Z {
            return self.z.clone();
        }
        let (v, e) = self.masks(which);
        self.z.restricted(&v, &e)
    }

    /// `(vertices, edges)` of the selected subgraph.
    pub fn cell_counts(&self, which: Which) -> (usize, usize) {
        let v = self.z.vertex_ids().filter(|&v| self.vertex_flags[v].is_in(which)).count();
        let e = self.z.edge_ids().filter(|&e| self.edge_flags[e].is_in(which)).count();
        (v, e)
    }

    /// `A#` as an immersed pointed core graph.
    pub fn image_subgroup(&self, which: Which) -> Result<SubgroupGraph> {
        Ok(SubgroupGraph::from_graph(&self.subgraph(which))?)
    }

    /// `rr(Z, A)` for `A` = `X` or `Y` (or `X∩Y`).
    pub fn relative_rank(&self, which: Which) -> Result<usize> {
        if !self.subgraph(which).is_connected() || !self.z.is_connected() {
            return Err(Error::Structure(format!("{which} is not connected")));
        }
        relative_rank_counts(self.cell_counts(Which::Z), self.cell_counts(which))
    }

    /// `(rr(Z, X), rr(Z, Y))`.
    pub fn rr(&self) -> Result<(usize, usize)> {
        Ok((self.relative_rank(Which::X)?, self.relative_rank(Which::Y)?))
    }

    /// The pair `(Z, A)`.
    pub fn pair(&self, which: Which) -> Result<GraphPair> {
        let (v, e) = self.masks(which);
        GraphPair::new(self.z.clone(), v, e)
    }

    /// `(Y, X∩Y)` is ψ-invariant and `(X, X∩Y)` is ψ⁻¹-invariant.
    pub fn is_bi_invariant(&self, psi: &Automorphism) -> Result<bool> {
        let e = self.image_subgroup(Which::XY)?;
        let y = self.image_subgroup(Which::Y)?;
        if !is_invariant(&y, &e, psi, 1)? {
            return Ok(false);
        }
        let x = self.image_subgroup(Which::X)?;
        is_invariant(&x, &e, psi, -1)
    }

    /// Whether the selected subgraph immerses.
    pub fn is_tight(&self, which: Which) -> bool {
        self.subgraph(which).is_immersed()
    }

    /// The first foldable pair of edges inside the selected subgraph: lowest
    /// vertex, then lowest letter, then the two lowest edge ids.
    pub fn foldable_pair(&self, which: Which) -> Option<(EdgeId, EdgeId)> {
        let g = self.subgraph(which);
        let mut best: Option<(VertexId, EdgeId, EdgeId)> = None;
        for v in g.vertex_ids() {
            let mut ends: Vec<_> = g.outgoing(v).into_iter().map(|oe| (g.letter(oe), oe.edge)).collect();
            ends.sort();
            if let Some(p) = ends.windows(2).find(|p| p[0].0 == p[1].0) {
                // Within one letter the ids are sorted, so p is the lowest pair.
                // A loop contributes two ends with different letters, so p[0].1 != p[1].1.
                best = Some((v, p[0].1, p[1].1));
                break;
            }
        }
        best.map(|(_, a, b)| (a, b))
    }

    /// Folds `e1` and `e2` in `Z` and unions the flags of identified cells.
    pub fn fold(&mut self, e1: EdgeId, e2: EdgeId) -> Result<FoldRecord> {
        let rec = self.z.fold_once(e1, e2)?;
        let removed = self.edge_flags[rec.removed_edge];
        self.edge_flags[rec.kept_edge] = self.edge_flags[rec.kept_edge].union(removed);
        self.edge_flags[rec.removed_edge] = CellFlags::NONE;
        if let Some((survivor, loser)) = rec.merged {
            self.vertex_flags[survivor] = self.vertex_flags[survivor].union(self.vertex_flags[loser]);
            self.vertex_flags[loser] = CellFlags::NONE;
        }
        Ok(rec)
    }

    /// Wedges `g` at the basepoint with every new cell flagged `flags`.
    pub fn wedge_flagged(&mut self, g: &LabeledGraph, flags: CellFlags) {
        let (vmap, emap) = self.z.wedge_in(g);
        self.vertex_flags.resize(self.z.vertex_capacity(), CellFlags::NONE);
        self.edge_flags.resize(self.z.edge_capacity(), CellFlags::NONE);
        let b = self.basepoint();
        for v in vmap.into_iter().flatten().filter(|&v| v != b) {
            self.vertex_flags[v] = flags;
        }
        for e in emap.into_iter().flatten() {
            self.edge_flags[e] = flags;
        }
    }

    /// Wedges the lollipop `Γ(w)` onto the triple.
    pub fn add_loop(&mut self, w: &Word, flags: CellFlags) -> Result<()> {
        let g = subgroup_graph(self.alphabet_rank(), std::slice::from_ref(w))?;
        self.wedge_flagged(&g, flags);
        Ok(())
    }

    /// Checks the data-structure invariants: pointed, `Z = X ∪ Y`, flagged
    /// edges have flagged ends, and `X`, `Y`, `X∩Y` connected through the
    /// basepoint.
    pub fn validate(&self) -> Result<()> {
        let b = self.z.basepoint().ok_or_else(|| Error::Structure("triple has no basepoint".into()))?;
        if !self.vertex_flags[b].both() {
            return Err(Error::Structure("basepoint is not in X∩Y".into()));
        }
        for v in self.z.vertex_ids() {
            if self.vertex_flags[v] == CellFlags::NONE {
                return Err(Error::Structure(format!("vertex {v} is in neither X nor Y")));
            }
        }
        for (id, e) in self.z.edges() {
            let f = self.edge_flags[id];
            if f == CellFlags::NONE {
                return Err(Error::Structure(format!("edge {id} is in neither X nor Y")));
            }
            for end in [e.origin, e.terminus] {
                let g = self.vertex_flags[end];
                if (f.x && !g.x) || (f.y && !g.y) {
                    return Err(Error::Structure(format!("edge {id} has an end outside its subgraph")));
                }
            }
        }
        for which in [Which::X, Which::Y, Which::XY] {
            if !self.subgraph(which).is_connected() {
                return Err(Error::Structure(format!("{which} is not connected")));
            }
        }
        Ok(())
    }

    /// Graphviz rendering with a `memb` attribute and a color per cell.
    pub fn dot(&self) -> String {
        fn attrs(f: CellFlags) -> String {
            let color = match f.label() {
                "XY" => "black",
                "X" => "red",
                "Y" => "blue",
                _ => "gray",
            };
            format!("memb=\"{}\", color={color}", f.label())
        }
        let style = DotStyle {
            name: Some("T".into()),
            vertex_attrs: self.vertex_flags.iter().map(|&f| Some(attrs(f))).collect(),
            edge_attrs: self.edge_flags.iter().map(|&f| Some(attrs(f))).collect(),
        };
        dot_graph(&self.z, &style)
    }

    /// Renumbers cells consecutively, carrying the flags along.
    pub fn compacted(&self) -> GraphTriple {
        let (z, vmap, emap) = self.z.compacted();
        let mut vertex_flags = vec![CellFlags::NONE; z.vertex_capacity()];
        let mut edge_flags = vec![CellFlags::NONE; z.edge_capacity()];
        for (old, new) in vmap.iter().enumerate() {
            if let Some(n) = new {
                vertex_flags[*n] = self.vertex_flags[old];
            }
        }
        for (old, new) in emap.iter().enumerate() {
            if let Some(n) = new {
                edge_flags[*n] = self.edge_flags[old];
            }
        }
        GraphTriple { z, vertex_flags, edge_flags }
    }
}

impl fmt::Display for GraphTriple {
    /// One line per cell: `v<i> <memb>` and `e<i> v<o> -> v<t> <letter> <memb>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (vz, ez) = self.cell_counts(Which::Z);
        writeln!(f, "basepoint: v{}", self.basepoint())?;
        writeln!(f, "cells: {vz} vertices, {ez} edges")?;
        for v in self.z.vertex_ids() {
            writeln!(f, "v{v} {}", self.vertex_flags[v].label())?;
        }
        for (id, e) in self.z.edges() {
            let letter = Letter::positive(e.label as usize);
            writeln!(f, "e{id} v{} -> v{} {letter} {}", e.origin, e.terminus, self.edge_flags[id].label())?;
        }
        Ok(())
    }
}

/// `(Γ(L) ∨ Γ(ψL) ∨ Γ(ψ⁻¹L), Γ(L) ∨ Γ(ψL), Γ(L) ∨ Γ(ψ⁻¹L))`: a bi-invariant
/// triple for `⟨L, t⟩`. The wedge is formal; nothing is folded across
/// factors.
pub fn initial_triple(l: &[Word], psi: &Automorphism) -> Result<GraphTriple> {
    let rank = psi.rank();
    for w in l {
        w.check_alphabet(rank)?;
    }
    let mut t = GraphTriple::uniform(subgroup_graph(rank, l)?)?;
    let forward = subgroup_graph(rank, &psi.apply_all(l, 1)?)?;
    let backward = subgroup_graph(rank, &psi.apply_all(l, -1)?)?;
    t.wedge_flagged(&forward, CellFlags::Y);
    t.wedge_flagged(&backward, CellFlags::X);
    t.validate()?;
    Ok(t)
}
