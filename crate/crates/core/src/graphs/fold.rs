use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{survivor_of, EdgeId, LabeledGraph, OrientedEdge, VertexId};
use crate::words::Letter;

/// One fold: `removed_edge` was identified with `kept_edge`, and if the far
/// endpoints differed, `merged = Some((survivor, removed))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldRecord {
    pub kept_edge: EdgeId,
    pub removed_edge: EdgeId,
    pub merged: Option<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FoldTrace {
    pub records: Vec<FoldRecord>,
}

impl FoldTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Which clashing pair to fold next.
#[derive(Debug, Clone)]
pub enum FoldOrder {
    /// Lowest vertex id, then lowest letter, then lowest edge ids.
    Lowest,
    /// Uniformly random clashing pair; reproducible from the seed.
    Random(Box<ChaCha8Rng>),
}

impl FoldOrder {
    pub fn random(seed: u64) -> FoldOrder {
        FoldOrder::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }
}

/// Folding state: the graph plus the letters leaving each vertex.
struct Folder {
    g: LabeledGraph,
    inc: Vec<Vec<(Letter, OrientedEdge)>>,
    trace: FoldTrace,
}

impl Folder {
    fn new(g: LabeledGraph) -> Folder {
        let inc = g.adjacency();
        Folder { g, inc, trace: FoldTrace::default() }
    }

    fn clash_at(&mut self, v: VertexId) -> Option<(OrientedEdge, OrientedEdge)> {
        let list = &mut self.inc[v];
        list.sort();
        list.windows(2).find(|p| p[0].0 == p[1].0).map(|p| (p[0].1, p[1].1))
    }

    fn all_clashes(&mut self) -> Vec<(OrientedEdge, OrientedEdge)> {
        let mut out = Vec::new();
        for v in 0..self.inc.len() {
            if !self.g.has_vertex(v) {
                continue;
            }
            let list = &mut self.inc[v];
            list.sort();
            let mut i = 0;
            while i < list.len() {
                let mut j = i + 1;
                while j < list.len() && list[j].0 == list[i].0 {
                    j += 1;
                }
                for a in i..j {
                    for b in a + 1..j {
                        out.push((list[a].1, list[b].1));
                    }
                }
                i = j;
            }
        }
        out
    }

    fn detach(&mut self, e: EdgeId) {
        let edge = self.g.edge(e).copied().expect("live edge");
        self.inc[edge.origin].retain(|(_, oe)| oe.edge != e);
        self.inc[edge.terminus].retain(|(_, oe)| oe.edge != e);
    }

    /// Same quotient as [`LabeledGraph::fold_oriented`], keeping the
    /// incidence lists in step. Returns the vertex that absorbed the fold.
    fn fold(&mut self, keep: OrientedEdge, remove: OrientedEdge) -> VertexId {
        let w1 = self.g.terminus(keep);
        let w2 = self.g.terminus(remove);
        self.detach(remove.edge);
        self.g.remove_edge(remove.edge);
        let mut merged = None;
        let mut target = w1;
        if w1 != w2 {
            let (survivor, loser) = survivor_of(w1, w2, self.g.basepoint());
            let moved = std::mem::take(&mut self.inc[loser]);
            for &(_, oe) in &moved {
                let e = self.g.edges[oe.edge].as_mut().expect("live edge");
                if e.origin == loser {
                    e.origin = survivor;
                }
                if e.terminus == loser {
                    e.terminus = survivor;
                }
            }
            self.inc[survivor].extend(moved);
            self.g.vertices[loser] = false;
            merged = Some((survivor, loser));
            target = survivor;
        }
        self.trace.records.push(FoldRecord { kept_edge: keep.edge, removed_edge: remove.edge, merged });
        target
    }
}

pub(super) fn fold_all(g: LabeledGraph, order: &mut FoldOrder) -> (LabeledGraph, FoldTrace) {
    let mut f = Folder::new(g);
    match order {
        FoldOrder::Lowest => {
            let mut work: BTreeSet<VertexId> = f.g.vertex_ids().collect();
            while let Some(v) = work.pop_first() {
                if !f.g.has_vertex(v) {
                    continue;
                }
                if let Some((a, b)) = f.clash_at(v) {
                    let (keep, remove) = if a.edge < b.edge { (a, b) } else { (b, a) };
                    let origin = f.g.origin(keep);
                    let target = f.fold(keep, remove);
                    work.insert(target);
                    if f.g.has_vertex(origin) {
                        work.insert(origin);
                    }
                }
            }
        }
        FoldOrder::Random(rng) => loop {
            let clashes = f.all_clashes();
            let Some(&(a, b)) = clashes.choose(rng) else { break };
            let (keep, remove) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            f.fold(keep, remove);
        },
    }
    (f.g, f.trace)
}
