//! Folding graph triples and the tightening procedures.
//!
//! A fold `q` of `Z` restricts to each of `X`, `Y` as a fold, a
//! homeomorphism, or neither (two vertices identified with no edge
//! identified). A restriction is *bad* when it is neither; the class of the
//! fold is read off from which restrictions are bad:
//!
//! | bad X | bad Y | class    |
//! |-------|-------|----------|
//! | no    | no    | ordinary |
//! | no    | yes   | single X |
//! | yes   | no    | single Y |
//! | yes   | yes   | double   |
//!
//! Exceptional folds enlarge `(X∩Y)#` by an element `δ`; bi-invariance is
//! then restored by wedging `Γ(ψ⁻¹δ)` onto `X` and/or `Γ(ψδ)` onto `Y` when
//! they are not already there.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{EdgeId, OrientedEdge, VertexId};
use crate::triples::{CellFlags, GraphTriple, Which};
use crate::words::{Automorphism, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldClass {
    /// Both restrictions are folds, or only the `X` one is.
    OrdinaryX,
    OrdinaryY,
    /// Neither restriction folds; `w₁ ≠ w₂` lie outside `X∩Y`.
    OrdinaryCase2,
    /// Neither restriction folds; `w₁ = w₂`.
    OrdinaryCase3,
    /// `q|Y` is bad and `q|X` is a fold.
    SingleX1a,
    /// `q|Y` is bad and `q|X` is a homeomorphism.
    SingleX1b,
    SingleY2a,
    SingleY2b,
    Double,
}

impl FoldClass {
    pub fn name(self) -> &'static str {
        match self {
            FoldClass::OrdinaryX => "ordinary-x",
            FoldClass::OrdinaryY => "ordinary-y",
            FoldClass::OrdinaryCase2 => "ordinary-case2",
            FoldClass::OrdinaryCase3 => "ordinary-case3",
            FoldClass::SingleX1a => "single-x-1a",
            FoldClass::SingleX1b => "single-x-1b",
            FoldClass::SingleY2a => "single-y-2a",
            FoldClass::SingleY2b => "single-y-2b",
            FoldClass::Double => "double",
        }
    }

    pub fn is_ordinary(self) -> bool {
        matches!(
            self,
            FoldClass::OrdinaryX | FoldClass::OrdinaryY | FoldClass::OrdinaryCase2 | FoldClass::OrdinaryCase3
        )
    }

    pub fn is_single(self) -> bool {
        matches!(self, FoldClass::SingleX1a | FoldClass::SingleX1b | FoldClass::SingleY2a | FoldClass::SingleY2b)
    }
}

impl fmt::Display for FoldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A classified foldable pair. `e1`, `e2` are oriented away from the common
/// vertex `v` and end at `w1`, `w2`. For 1b and double folds `e1` is the
/// edge outside `Y`; for 2b it is the edge outside `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldClassification {
    pub class: FoldClass,
    pub e1: OrientedEdge,
    pub e2: OrientedEdge,
    pub v: VertexId,
    pub w1: VertexId,
    pub w2: VertexId,
}

/// What a fold does to one subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Restriction {
    Homeomorphism,
    Fold,
    Neither,
}

fn restriction(t: &GraphTriple, which: Which, e1: OrientedEdge, e2: OrientedEdge, w1: VertexId, w2: VertexId) -> Restriction {
    let in_edge = |oe: OrientedEdge| t.edge_flags(oe.edge).is_in(which);
    let in_vertex = |v: VertexId| t.vertex_flags(v).is_in(which);
    if in_edge(e1) && in_edge(e2) {
        Restriction::Fold
    } else if in_vertex(w1) && in_vertex(w2) && w1 != w2 {
        Restriction::Neither
    } else {
        Restriction::Homeomorphism
    }
}

/// The same data read off from cell counts of an actual quotient.
fn quotient_restriction(before: (usize, usize), after: (usize, usize)) -> Option<Restriction> {
    let dv = before.0 as i64 - after.0 as i64;
    let de = before.1 as i64 - after.1 as i64;
    match (dv, de) {
        (0, 0) => Some(Restriction::Homeomorphism),
        (0, 1) | (1, 1) => Some(Restriction::Fold),
        (1, 0) => Some(Restriction::Neither),
        _ => None,
    }
}

/// Classifies the fold of `e1` and `e2` in `Z`.
pub fn classify_fold(t: &GraphTriple, e1: EdgeId, e2: EdgeId) -> Result<FoldClassification> {
    let z = t.z();
    let (mut o1, mut o2) = z.foldable_orientation(e1, e2)?;
    let v = z.origin(o1);
    let (mut w1, mut w2) = (z.terminus(o1), z.terminus(o2));
    let rx = restriction(t, Which::X, o1, o2, w1, w2);
    let ry = restriction(t, Which::Y, o1, o2, w1, w2);
    let outside = |oe: OrientedEdge, side: Which| !t.edge_flags(oe.edge).is_in(side);
    let mut normalize = |side: Which| {
        if !outside(o1, side) {
            std::mem::swap(&mut o1, &mut o2);
            std::mem::swap(&mut w1, &mut w2);
        }
    };
    use Restriction::*;
    let class = match (rx, ry) {
        (Fold, _) if ry != Neither => FoldClass::OrdinaryX,
        (_, Fold) if rx != Neither => FoldClass::OrdinaryY,
        (Homeomorphism, Homeomorphism) => {
            normalize(Which::Y);
            if w1 != w2 {
                FoldClass::OrdinaryCase2
            } else {
                FoldClass::OrdinaryCase3
            }
        }
        (Fold, Neither) => FoldClass::SingleX1a,
        (Homeomorphism, Neither) => {
            normalize(Which::Y);
            FoldClass::SingleX1b
        }
        (Neither, Fold) => FoldClass::SingleY2a,
        (Neither, Homeomorphism) => {
            normalize(Which::X);
            FoldClass::SingleY2b
        }
        (Neither, Neither) => {
            normalize(Which::Y);
            FoldClass::Double
        }
        _ => unreachable!("fold cases are exhaustive"),
    };
    let c = FoldClassification { class, e1: o1, e2: o2, v, w1, w2 };
    cross_check(t, &c)?;
    Ok(c)
}

/// Re-derives the class from the cell counts of the actual quotient and the
/// witness shape, and fails loudly on any disagreement.
fn cross_check(t: &GraphTriple, c: &FoldClassification) -> Result<()> {
    let mut q = t.clone();
    q.fold(c.e1.edge, c.e2.edge)?;
    let kind = |which| {
        quotient_restriction(t.cell_counts(which), q.cell_counts(which))
            .ok_or_else(|| Error::Internal(format!("fold changed {which} by more than one cell")))
    };
    let (kx, ky) = (kind(Which::X)?, kind(Which::Y)?);
    use Restriction::*;
    let f1 = t.edge_flags(c.e1.edge);
    let f2 = t.edge_flags(c.e2.edge);
    let in_xy = |v: VertexId| t.vertex_flags(v).both();
    let ok = match c.class {
        FoldClass::OrdinaryX => kx == Fold && ky != Neither,
        FoldClass::OrdinaryY => ky == Fold && kx != Neither && kx != Fold,
        FoldClass::OrdinaryCase2 => {
            kx == Homeomorphism && ky == Homeomorphism && f1 == CellFlags::X && f2 == CellFlags::Y && c.w1 != c.w2
        }
        FoldClass::OrdinaryCase3 => {
            kx == Homeomorphism && ky == Homeomorphism && f1 == CellFlags::X && f2 == CellFlags::Y && c.w1 == c.w2
        }
        FoldClass::SingleX1a => kx == Fold && ky == Neither,
        FoldClass::SingleX1b => {
            kx == Homeomorphism && ky == Neither && f1 == CellFlags::X && f2 == CellFlags::Y && in_xy(c.w1)
        }
        FoldClass::SingleY2a => ky == Fold && kx == Neither,
        FoldClass::SingleY2b => {
            ky == Homeomorphism && kx == Neither && f1 == CellFlags::Y && f2 == CellFlags::X && in_xy(c.w1)
        }
        FoldClass::Double => {
            kx == Neither
                && ky == Neither
                && f1 == CellFlags::X
                && f2 == CellFlags::Y
                && c.w1 != c.w2
                && in_xy(c.w1)
                && in_xy(c.w2)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "classification {} disagrees with the quotient (X: {kx:?}, Y: {ky:?})",
            c.class
        )))
    }
}

/// One step of a tightening run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightenEvent {
    pub step: usize,
    pub class: FoldClass,
    pub e1: EdgeId,
    pub e2: EdgeId,
    pub delta: Option<Word>,
    pub loops_added: u8,
    pub rr_before: (usize, usize),
    pub rr_after: (usize, usize),
    /// `(vertices, edges)` of `Z`.
    pub cells_before: (usize, usize),
    pub cells_after: (usize, usize),
    pub metric_before: (usize, usize),
    pub metric_after: (usize, usize),
    /// The pair bounds a bigon not contained in `X∩Y`.
    pub bigon_outside_xy: bool,
}

impl TightenEvent {
    /// Folds after which the relative ranks must drop in sum: a bigon
    /// outside `X∩Y`, a single exceptional fold without a loop, a double
    /// exceptional fold with at most one loop.
    pub fn expects_strict_decrease(&self) -> bool {
        match self.class {
            c if c.is_ordinary() => self.bigon_outside_xy,
            c if c.is_single() => self.loops_added == 0,
            _ => self.loops_added <= 1,
        }
    }

    pub fn rr_sum_decreased(&self) -> bool {
        self.rr_after.0 + self.rr_after.1 < self.rr_before.0 + self.rr_before.1
    }
}

impl fmt::Display for TightenEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delta = self.delta.as_ref().map_or("-".to_string(), |d| if d.is_empty() { "1".into() } else { d.to_string() });
        write!(
            f,
            "step={} class={} e1={} e2={} delta={} loops_added={} rr_x={}->{} rr_y={}->{} cells={}/{}->{}/{}",
            self.step,
            self.class,
            self.e1,
            self.e2,
            delta,
            self.loops_added,
            self.rr_before.0,
            self.rr_after.0,
            self.rr_before.1,
            self.rr_after.1,
            self.cells_before.0,
            self.cells_before.1,
            self.cells_after.0,
            self.cells_after.1,
        )
    }
}

/// `(|vertices of X∩Y|, |edges of Z|)`, compared lexicographically.
pub fn progress_metric(t: &GraphTriple) -> (usize, usize) {
    (t.cell_counts(Which::XY).0, t.cell_counts(Which::Z).1)
}

/// `10·(|edges of Z| + 1)²`.
pub fn default_budget(t: &GraphTriple) -> usize {
    let e = t.cell_counts(Which::Z).1 + 1;
    10 * e * e
}

/// The word read along the spanning tree of `X∩Y` from the basepoint to `v`.
fn xy_path(t: &GraphTriple, v: VertexId) -> Result<Word> {
    let g = t.subgraph(Which::XY);
    let b = t.basepoint();
    let (parent, _) = g.bfs_tree(b);
    if v != b && parent.get(v).copied().flatten().is_none() {
        return Err(Error::Structure(format!("vertex {v} is not reachable inside X∩Y")));
    }
    Ok(g.tree_word(&parent, v))
}

fn delta(t: &GraphTriple, c: &FoldClassification) -> Result<Option<Word>> {
    let d = match c.class {
        FoldClass::SingleX1a | FoldClass::SingleY2a | FoldClass::Double => {
            xy_path(t, c.w1)?.concat(&xy_path(t, c.w2)?.inverse())
        }
        FoldClass::SingleX1b | FoldClass::SingleY2b => {
            let back = Word::from_letters([t.z().letter(c.e1.reversed())]);
            xy_path(t, c.w1)?.concat(&back).concat(&xy_path(t, c.v)?.inverse())
        }
        _ => return Ok(None),
    };
    Ok(Some(d))
}

/// Folds `e1`, `e2` and restores bi-invariance by adding at most two
/// lollipops. Checks bi-invariance, flag invariants and monotonicity of the
/// relative ranks after the step.
pub fn fold_and_add_loops(
    t: &GraphTriple,
    psi: &Automorphism,
    e1: EdgeId,
    e2: EdgeId,
) -> Result<(GraphTriple, TightenEvent)> {
    let c = classify_fold(t, e1, e2)?;
    let d = delta(t, &c)?;
    let rr_before = t.rr()?;
    let bigon_outside_xy =
        c.class.is_ordinary() && c.w1 == c.w2 && !(t.edge_flags(c.e1.edge).both() && t.edge_flags(c.e2.edge).both());
    let mut out = t.clone();
    out.fold(c.e1.edge, c.e2.edge)?;
    let mut loops_added = 0;
    if let Some(d) = &d {
        let add_x = matches!(c.class, FoldClass::SingleX1a | FoldClass::SingleX1b | FoldClass::Double);
        let add_y = matches!(c.class, FoldClass::SingleY2a | FoldClass::SingleY2b | FoldClass::Double);
        if add_x {
            let target = psi.apply(d, -1)?;
            if !t.image_subgroup(Which::X)?.contains(&target) {
                out.add_loop(&target, CellFlags::X)?;
                loops_added += 1;
            }
        }
        if add_y {
            let target = psi.apply(d, 1)?;
            if !t.image_subgroup(Which::Y)?.contains(&target) {
                out.add_loop(&target, CellFlags::Y)?;
                loops_added += 1;
            }
        }
    }
    out.validate().map_err(|e| Error::Internal(format!("after {} fold: {e}", c.class)))?;
    if !out.is_bi_invariant(psi)? {
        return Err(Error::Internal(format!("bi-invariance lost after {} fold of e{e1}, e{e2}", c.class)));
    }
    let rr_after = out.rr()?;
    if rr_after.0 > rr_before.0 || rr_after.1 > rr_before.1 {
        return Err(Error::Internal(format!(
            "relative ranks rose from {rr_before:?} to {rr_after:?} after {} fold",
            c.class
        )));
    }
    let event = TightenEvent {
        step: 0,
        class: c.class,
        e1: c.e1.edge,
        e2: c.e2.edge,
        delta: d,
        loops_added,
        rr_before,
        rr_after,
        cells_before: t.cell_counts(Which::Z),
        cells_after: out.cell_counts(Which::Z),
        metric_before: progress_metric(t),
        metric_after: progress_metric(&out),
        bigon_outside_xy,
    };
    if event.expects_strict_decrease() && !event.rr_sum_decreased() {
        return Err(Error::Internal(format!("{} fold should have lowered rr(Z,X) + rr(Z,Y)", c.class)));
    }
    Ok((out, event))
}

/// Result of a tightening procedure.
#[derive(Debug, Clone)]
pub struct TightenRun {
    pub triple: GraphTriple,
    pub events: Vec<TightenEvent>,
    /// False only for a capped `Z` run that ran out of budget.
    pub completed: bool,
}

struct Runner<'a> {
    psi: &'a Automorphism,
    triple: GraphTriple,
    events: Vec<TightenEvent>,
    budget: usize,
}

impl Runner<'_> {
    /// One fold-and-add-loops step. Returns false when the budget is spent.
    fn step(&mut self, e1: EdgeId, e2: EdgeId, check_metric: bool) -> Result<bool> {
        if self.events.len() >= self.budget {
            return Ok(false);
        }
        let (next, mut event) = fold_and_add_loops(&self.triple, self.psi, e1, e2)?;
        event.step = self.events.len();
        if check_metric && event.metric_after >= event.metric_before {
            return Err(Error::Internal(format!(
                "{} fold did not lower the progress measure {:?}",
                event.class, event.metric_before
            )));
        }
        self.triple = next;
        self.events.push(event);
        Ok(true)
    }

    /// Tightens one side. Returns false when the budget is spent.
    fn side(&mut self, side: Which) -> Result<bool> {
        while !self.triple.is_tight(side) {
            let pair = self.triple.foldable_pair(Which::XY).or_else(|| self.triple.foldable_pair(side));
            let (e1, e2) = pair.ok_or_else(|| Error::Internal(format!("{side} not tight but no pair found")))?;
            if !self.step(e1, e2, true)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn both(&mut self) -> Result<bool> {
        loop {
            if !self.triple.is_tight(Which::X) {
                if !self.side(Which::X)? {
                    return Ok(false);
                }
            } else if !self.triple.is_tight(Which::Y) {
                if !self.side(Which::Y)? {
                    return Ok(false);
                }
            } else {
                return Ok(true);
            }
        }
    }

    fn finish(self, completed: bool, procedure: &'static str) -> Result<TightenRun> {
        if !completed && procedure != "tighten_Z" {
            return Err(Error::Budget { procedure, budget: self.budget });
        }
        Ok(TightenRun { triple: self.triple, events: self.events, completed })
    }
}

fn runner<'a>(t: &GraphTriple, psi: &'a Automorphism, budget: Option<usize>) -> Result<Runner<'a>> {
    t.validate()?;
    let budget = budget.unwrap_or_else(|| default_budget(t));
    Ok(Runner { psi, triple: t.clone(), events: Vec::new(), budget })
}

/// Folds inside `X∩Y`, then inside `X`, until `X` immerses.
pub fn tighten_x(t: &GraphTriple, psi: &Automorphism, budget: Option<usize>) -> Result<TightenRun> {
    let mut r = runner(t, psi, budget)?;
    let done = r.side(Which::X)?;
    r.finish(done, "tighten_X")
}

pub fn tighten_y(t: &GraphTriple, psi: &Automorphism, budget: Option<usize>) -> Result<TightenRun> {
    let mut r = runner(t, psi, budget)?;
    let done = r.side(Which::Y)?;
    r.finish(done, "tighten_Y")
}

/// Tightens `X`, then `Y`, repeating until both immerse.
pub fn tighten_xy(t: &GraphTriple, psi: &Automorphism, budget: Option<usize>) -> Result<TightenRun> {
    let mut r = runner(t, psi, budget)?;
    let done = r.both()?;
    r.finish(done, "tighten_XY")
}

/// Alternates [`tighten_xy`] with folds anywhere in `Z` until `Z` immerses.
/// Running out of budget is reported through `completed`, since whether
/// this procedure always terminates is not known.
pub fn tighten_z_capped(t: &GraphTriple, psi: &Automorphism, budget: Option<usize>) -> Result<TightenRun> {
    let mut r = runner(t, psi, budget)?;
    loop {
        if !r.both()? {
            return r.finish(false, "tighten_Z");
        }
        let Some((e1, e2)) = r.triple.foldable_pair(Which::Z) else {
            return r.finish(true, "tighten_Z");
        };
        if !r.step(e1, e2, false)? {
            return r.finish(false, "tighten_Z");
        }
    }
}

/// One record per event as `key=value` text.
pub fn event_log_text(events: &[TightenEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::LabeledGraph;
    use crate::triples::initial_triple;
    use crate::words::w;

    fn psi1() -> Automorphism {
        Automorphism::parse(&["a", "abA"], &["a", "Aba"]).unwrap()
    }

    fn psi3() -> Automorphism {
        Automorphism::parse(&["b", "ab"], &["bA", "a"]).unwrap()
    }

    /// Builds a triple from `(origin, terminus, label, flags)` edges over
    /// vertices with the given flags; vertex 0 is the basepoint.
    fn triple(rank: usize, vertices: &[CellFlags], edges: &[(usize, usize, usize, CellFlags)]) -> GraphTriple {
        let mut z = LabeledGraph::new(rank);
        for _ in vertices {
            z.add_vertex();
        }
        z.set_basepoint(Some(0));
        for &(o, t, l, _) in edges {
            z.add_edge(o, t, l);
        }
        GraphTriple::from_parts(z, vertices.to_vec(), edges.iter().map(|e| e.3).collect()).unwrap()
    }

    use CellFlags as F;

    #[test]
    fn fold_inside_intersection_is_ordinary() {
        let t = triple(2, &[F::XY], &[(0, 0, 0, F::XY), (0, 0, 0, F::XY)]);
        let c = classify_fold(&t, 0, 1).unwrap();
        assert_eq!(c.class, FoldClass::OrdinaryX);
        let (out, ev) = fold_and_add_loops(&t, &Automorphism::identity(2), 0, 1).unwrap();
        assert_eq!(ev.loops_added, 0);
        assert_eq!(ev.rr_before, ev.rr_after);
        assert_eq!(out.cell_counts(Which::Z), (1, 1));
    }

    #[test]
    fn double_fold_witness_shape() {
        // v0 --a--> v1 (X only), v0 --a--> v2 (Y only); v1, v2 in X∩Y via b-edges.
        let t = triple(
            2,
            &[F::XY, F::XY, F::XY],
            &[(0, 1, 0, F::X), (0, 2, 0, F::Y), (0, 1, 1, F::XY), (0, 2, 1, F::XY)],
        );
        let c = classify_fold(&t, 1, 0).unwrap();
        assert_eq!(c.class, FoldClass::Double);
        assert_eq!(c.e1.edge, 0);
        assert_eq!((c.w1, c.w2), (1, 2));
    }

    /// `X∩Y` reads `⟨aB, aC⟩` through v3, so both `X` and `Y` images equal
    /// `(X∩Y)#` and the triple is bi-invariant for the identity.
    fn saturated_edges() -> Vec<(usize, usize, usize, CellFlags)> {
        vec![
            (0, 1, 1, F::XY),
            (0, 2, 2, F::XY),
            (0, 3, 0, F::XY),
            (0, 3, 1, F::XY),
            (0, 3, 2, F::XY),
        ]
    }

    #[test]
    fn double_fold_with_delta_present() {
        let mut edges = saturated_edges();
        edges.push((0, 1, 0, F::X));
        edges.push((0, 2, 0, F::Y));
        let t = triple(3, &[F::XY; 4], &edges);
        let id = Automorphism::identity(3);
        assert!(t.is_bi_invariant(&id).unwrap());
        assert_eq!(classify_fold(&t, 5, 6).unwrap().class, FoldClass::Double);
        let (out, ev) = fold_and_add_loops(&t, &id, 5, 6).unwrap();
        assert_eq!(ev.delta, Some(w("bC")));
        assert_eq!(ev.loops_added, 0);
        assert_eq!((ev.rr_before, ev.rr_after), ((1, 1), (0, 0)));
        assert!(ev.expects_strict_decrease());
        assert!(out.is_bi_invariant(&id).unwrap());
    }

    #[test]
    fn single_x_1a_example() {
        let mut edges = saturated_edges();
        edges.push((0, 1, 0, F::XY));
        edges.push((0, 2, 0, F::X));
        let t = triple(3, &[F::XY; 4], &edges);
        let id = Automorphism::identity(3);
        assert!(t.is_bi_invariant(&id).unwrap());
        assert_eq!(classify_fold(&t, 5, 6).unwrap().class, FoldClass::SingleX1a);
        let (_, ev) = fold_and_add_loops(&t, &id, 5, 6).unwrap();
        assert_eq!(ev.delta, Some(w("aC")));
        assert_eq!(ev.loops_added, 0);
        assert!(ev.rr_sum_decreased());
    }

    #[test]
    fn ordinary_cases_two_and_three() {
        let t = triple(2, &[F::XY, F::X, F::Y], &[(0, 2, 0, F::Y), (0, 1, 0, F::X)]);
        let c = classify_fold(&t, 0, 1).unwrap();
        assert_eq!(c.class, FoldClass::OrdinaryCase2);
        assert_eq!(c.e1.edge, 1);
        let t = triple(2, &[F::XY, F::XY], &[(0, 1, 0, F::X), (0, 1, 0, F::Y), (0, 1, 1, F::XY)]);
        assert_eq!(classify_fold(&t, 0, 1).unwrap().class, FoldClass::OrdinaryCase3);
    }

    #[test]
    fn single_exceptional_1b_and_2b() {
        let t = triple(2, &[F::XY, F::XY, F::Y], &[(0, 2, 0, F::Y), (0, 1, 0, F::X), (0, 1, 1, F::XY)]);
        let c = classify_fold(&t, 0, 1).unwrap();
        assert_eq!(c.class, FoldClass::SingleX1b);
        assert_eq!((c.e1.edge, c.w1, c.w2), (1, 1, 2));
        let t = triple(2, &[F::XY, F::XY, F::X], &[(0, 2, 0, F::X), (0, 1, 0, F::Y), (0, 1, 1, F::XY)]);
        let c = classify_fold(&t, 0, 1).unwrap();
        assert_eq!(c.class, FoldClass::SingleY2b);
        assert_eq!((c.e1.edge, c.w1, c.w2), (1, 1, 2));
    }

    #[test]
    fn psi1_initial_triple_is_already_tight() {
        let t = initial_triple(&[w("b")], &psi1()).unwrap();
        for run in [
            tighten_x(&t, &psi1(), None).unwrap(),
            tighten_xy(&t, &psi1(), None).unwrap(),
            tighten_z_capped(&t, &psi1(), Some(10)).unwrap(),
        ] {
            assert!(run.events.is_empty());
            assert!(run.completed);
            assert_eq!(run.triple.rr().unwrap(), (1, 1));
        }
    }

    #[test]
    fn psi3_tightens_to_the_rose() {
        let t = initial_triple(&[w("a")], &psi3()).unwrap();
        let run = tighten_z_capped(&t, &psi3(), None).unwrap();
        assert!(run.completed);
        assert_eq!(run.triple.rr().unwrap(), (0, 0));
        let z = run.triple.image_subgroup(Which::Z).unwrap();
        assert_eq!(z.rank(), 2);
        assert!(run.triple.z().is_immersed());
        let log = event_log_text(&run.events);
        assert_eq!(log.lines().count(), run.events.len());
        assert!(log.starts_with("step=0 class="));
    }

    #[test]
    fn duplicated_generators_fold_inside_intersection() {
        let id = Automorphism::identity(2);
        let t = initial_triple(&[w("a"), w("a")], &id).unwrap();
        let run = tighten_x(&t, &id, None).unwrap();
        assert!(!run.events.is_empty());
        for e in &run.events {
            assert!(e.class.is_ordinary(), "{e}");
        }
    }

    #[test]
    fn rose_is_left_alone() {
        let g = crate::graphs::bouquet(2, &[w("a"), w("b")]).unwrap();
        let t = GraphTriple::uniform(g).unwrap();
        let run = tighten_xy(&t, &psi3(), None).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.triple, t);
    }

    #[test]
    fn budget_is_reported() {
        let id = Automorphism::identity(2);
        let t = initial_triple(&[w("a"), w("a")], &id).unwrap();
        assert!(matches!(tighten_x(&t, &id, Some(0)), Err(Error::Budget { .. })));
        let run = tighten_z_capped(&t, &id, Some(0)).unwrap();
        assert!(!run.completed);
    }
}
