//! Minimality certification, complements, presentations and minimization.
//!
//! For a tight bi-invariant triple, spanning trees give free complements
//! `Z# = X# * C = D * Y# = D * (X∩Y)# * C`. The triple is minimal iff every
//! map `θ_n` from `⋁Γ(ψ⁻ⁱD) ∨ (X∩Y) ∨ ⋁Γ(ψⁱC)` (`0 ≤ i ≤ n`) is injective,
//! which by the Hopf property is a rank count after folding. Only finitely
//! many levels can be checked, so reports say "certified to depth N".

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::graphs::{subgroup_rank, LabeledGraph, OrientedEdge};
use crate::tightening::{tighten_xy, tighten_z_capped, TightenEvent};
use crate::triples::{initial_triple, GraphTriple, Which};
use crate::words::{format_word_list, parse_word_list, Automorphism, Word};

/// `(f_Z)_*` is injective iff `Z` and its image have the same rank.
pub fn fz_injective(t: &GraphTriple) -> Result<bool> {
    Ok(t.z().rank()? == t.image_subgroup(Which::Z)?.rank())
}

/// Free complements read off a spanning tree of a tight triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complements {
    /// `Z# = X# * C`.
    pub c_basis: Vec<Word>,
    /// `Z# = D * Y#`.
    pub d_basis: Vec<Word>,
    /// A basis of `(X∩Y)#`.
    pub e_basis: Vec<Word>,
}

/// A spanning tree of `X∩Y`, extended into `X` and into `Y`; non-tree edges
/// are read as loops through this tree.
pub fn complements(t: &GraphTriple) -> Result<Complements> {
    let z = t.z();
    if !z.is_immersed() {
        return Err(Error::Precondition("complements need a tight triple".into()));
    }
    let b = t.basepoint();
    let mut in_tree = vec![false; z.edge_capacity()];
    let mut reached = vec![false; z.vertex_capacity()];
    reached[b] = true;
    // Grow inside X∩Y first, then let X and Y extend the tree separately;
    // extensions reach disjoint vertex sets, so the union stays a tree.
    for which in [Which::XY, Which::X, Which::Y] {
        let g = t.subgraph(which);
        let mut queue: VecDeque<_> = g.vertex_ids().filter(|&v| reached[v]).collect();
        while let Some(v) = queue.pop_front() {
            for oe in sorted_outgoing(&g, v) {
                let u = g.terminus(oe);
                if !reached[u] {
                    reached[u] = true;
                    in_tree[oe.edge] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    if z.vertex_ids().any(|v| !reached[v]) {
        return Err(Error::Structure("X ∪ Y does not span Z".into()));
    }
    let parent = tree_parents(z, &in_tree);
    let mut out = Complements { c_basis: Vec::new(), d_basis: Vec::new(), e_basis: Vec::new() };
    for e in z.edge_ids().filter(|&e| !in_tree[e]) {
        let word = z.edge_loop_word(&parent, e);
        let f = t.edge_flags(e);
        match (f.x, f.y) {
            (true, true) => out.e_basis.push(word),
            (true, false) => out.d_basis.push(word),
            (false, true) => out.c_basis.push(word),
            (false, false) => return Err(Error::Structure(format!("edge {e} outside X ∪ Y"))),
        }
    }
    Ok(out)
}

fn sorted_outgoing(g: &LabeledGraph, v: usize) -> Vec<OrientedEdge> {
    let mut out = g.outgoing(v);
    out.sort_by_key(|&oe| (g.letter(oe), oe));
    out
}

fn tree_parents(z: &LabeledGraph, in_tree: &[bool]) -> Vec<Option<OrientedEdge>> {
    let b = z.basepoint().expect("pointed");
    let mut parent = vec![None; z.vertex_capacity()];
    let mut seen = vec![false; z.vertex_capacity()];
    seen[b] = true;
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for oe in z.outgoing(v) {
            let u = z.terminus(oe);
            if in_tree[oe.edge] && !seen[u] {
                seen[u] = true;
                parent[u] = Some(oe);
                queue.push_back(u);
            }
        }
    }
    parent
}

/// Generators of the level-`n` wedge: `ψ⁻ⁱ(D)`, `E`, `ψⁱ(C)` for `0 ≤ i ≤ n`.
pub fn theta_generators(c: &Complements, psi: &Automorphism, n: usize) -> Result<Vec<Word>> {
    let mut gens = Vec::new();
    for i in 0..=n as i64 {
        gens.extend(psi.apply_all(&c.d_basis, -i)?);
    }
    gens.extend(c.e_basis.iter().cloned());
    for i in 0..=n as i64 {
        gens.extend(psi.apply_all(&c.c_basis, i)?);
    }
    Ok(gens)
}

/// Whether `θ_n` is injective: the folded wedge has rank
/// `(n+1)|D| + |E| + (n+1)|C|`.
pub fn theta_n_injective(c: &Complements, psi: &Automorphism, n: usize) -> Result<bool> {
    let gens = theta_generators(c, psi, n)?;
    let expected = (n + 1) * c.d_basis.len() + c.e_basis.len() + (n + 1) * c.c_basis.len();
    Ok(subgroup_rank(psi.rank(), &gens)? == expected)
}

/// Outcome of [`certify_minimal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub checked_levels: usize,
    pub injective_up_to_n: bool,
    /// Smallest level at which `θ_n` failed.
    pub failed_level: Option<usize>,
    pub rr: (usize, usize),
    /// `χ(H)`, reported only when certified.
    pub chi: Option<i64>,
    pub fz_injective: bool,
    pub tight: bool,
}

impl MinimalityReport {
    pub fn certified(&self) -> bool {
        self.tight && self.fz_injective && self.injective_up_to_n
    }
}

impl fmt::Display for MinimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "checked_levels: {}", self.checked_levels)?;
        writeln!(f, "injective_up_to_N: {}", self.injective_up_to_n)?;
        match self.failed_level {
            Some(n) => writeln!(f, "failed_level: {n}")?,
            None => writeln!(f, "failed_level: none")?,
        }
        writeln!(f, "rr: ({}, {})", self.rr.0, self.rr.1)?;
        match self.chi {
            Some(chi) => writeln!(f, "chi: {chi}")?,
            None => writeln!(f, "chi: unknown")?,
        }
        writeln!(f, "fz_injective: {}", self.fz_injective)?;
        writeln!(f, "tight: {}", self.tight)
    }
}

/// Checks `θ_n` for every `n ≤ max_level`, spreading levels over `jobs`
/// threads. Returns the outcome per level.
pub fn theta_levels(c: &Complements, psi: &Automorphism, max_level: usize, jobs: usize) -> Result<Vec<bool>> {
    let levels: Vec<usize> = (0..=max_level).collect();
    let jobs = jobs.clamp(1, levels.len());
    if jobs == 1 {
        return levels.iter().map(|&n| theta_n_injective(c, psi, n)).collect();
    }
    let chunks: Vec<Vec<usize>> = (0..jobs).map(|j| levels.iter().copied().skip(j).step_by(jobs).collect()).collect();
    let mut results = vec![false; levels.len()];
    std::thread::scope(|s| -> Result<()> {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                s.spawn(move || chunk.iter().map(|&n| theta_n_injective(c, psi, n).map(|ok| (n, ok))).collect::<Result<Vec<_>>>())
            })
            .collect();
        for h in handles {
            for (n, ok) in h.join().expect("level check panicked")? {
                results[n] = ok;
            }
        }
        Ok(())
    })?;
    Ok(results)
}

/// Certifies minimality of a bi-invariant triple to depth `max_level`.
pub fn certify_minimal(t: &GraphTriple, psi: &Automorphism, max_level: usize, jobs: usize) -> Result<MinimalityReport> {
    let rr = t.rr()?;
    let fz = fz_injective(t)?;
    let tight = t.is_tight(Which::Z);
    let mut report = MinimalityReport {
        checked_levels: max_level,
        injective_up_to_n: false,
        failed_level: None,
        rr,
        chi: None,
        fz_injective: fz,
        tight,
    };
    if !tight {
        return Ok(report);
    }
    let c = complements(t)?;
    if rr != (c.c_basis.len(), c.d_basis.len()) {
        return Err(Error::Internal(format!(
            "complement sizes ({}, {}) differ from relative ranks {rr:?}",
            c.c_basis.len(),
            c.d_basis.len()
        )));
    }
    let levels = theta_levels(&c, psi, max_level, jobs)?;
    report.failed_level = levels.iter().position(|ok| !ok);
    report.injective_up_to_n = report.failed_level.is_none();
    if report.certified() {
        if rr.0 != rr.1 {
            return Err(Error::Internal(format!("certified triple with unequal relative ranks {rr:?}")));
        }
        report.chi = Some(-(rr.0 as i64));
    }
    Ok(report)
}

/// `⟨Z#, t | t⁻¹xt = ψ(x), x ∈ X#⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub z_basis: Vec<Word>,
    pub x_basis: Vec<Word>,
    pub phi_images: Vec<Word>,
}

impl Presentation {
    /// The defining presentation of the mapping torus of `ψ`.
    pub fn defining(psi: &Automorphism) -> Presentation {
        let gens: Vec<Word> = (0..psi.rank()).map(Word::generator).collect();
        Presentation { z_basis: gens.clone(), x_basis: gens, phi_images: psi.images().to_vec() }
    }

    /// Reads the text form written by `Display`.
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or_else(|| Error::Structure("empty presentation".into()))?;
        let gens = first
            .strip_prefix("gens:")
            .ok_or_else(|| Error::Structure(format!("expected 'gens:', got {first:?}")))?;
        let gens = gens.trim();
        let z_basis = if gens == "t" {
            Vec::new()
        } else {
            let rest = gens
                .strip_suffix(",t")
                .ok_or_else(|| Error::Structure("generator list must end with t".into()))?;
            parse_word_list(rest)?
        };
        let mut p = Presentation { z_basis, x_basis: Vec::new(), phi_images: Vec::new() };
        for line in lines {
            let rel = line
                .strip_prefix("rel: t^-1 ")
                .ok_or_else(|| Error::Structure(format!("expected 'rel: t^-1 ...', got {line:?}")))?;
            let (lhs, rhs) = rel
                .split_once(" t = ")
                .ok_or_else(|| Error::Structure(format!("malformed relation {line:?}")))?;
            p.x_basis.push(lhs.trim().parse()?);
            p.phi_images.push(rhs.trim().parse()?);
        }
        Ok(p)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z_basis.is_empty() {
            writeln!(f, "gens: t")?;
        } else {
            writeln!(f, "gens: {},t", format_word_list(&self.z_basis))?;
        }
        for (x, y) in self.x_basis.iter().zip(&self.phi_images) {
            writeln!(f, "rel: t^-1 {x} t = {y}")?;
        }
        Ok(())
    }
}

/// The HNN presentation of `H` from a certified triple.
pub fn presentation(t: &GraphTriple, psi: &Automorphism, report: &MinimalityReport) -> Result<Presentation> {
    if !report.certified() {
        return Err(Error::Uncertified(format!(
            "minimality not certified to depth {}",
            report.checked_levels
        )));
    }
    let z = t.image_subgroup(Which::Z)?;
    let x = t.image_subgroup(Which::X)?;
    let y = t.image_subgroup(Which::Y)?;
    let x_basis = x.basis();
    let phi_images = psi.apply_all(&x_basis, 1)?;
    if !z.contains_all(&x_basis) {
        return Err(Error::Internal("an X basis word is not in Z#".into()));
    }
    if !y.contains_all(&phi_images) || x.rank() != y.rank() {
        return Err(Error::Internal("ψ does not map X# onto Y#".into()));
    }
    Ok(Presentation { z_basis: z.basis(), x_basis, phi_images })
}

/// Output of [`minimize`].
#[derive(Debug, Clone)]
pub struct Minimized {
    pub triple: GraphTriple,
    pub report: MinimalityReport,
    pub rounds: usize,
    pub events: Vec<TightenEvent>,
    /// One line per round: relative ranks and the certification outcome.
    pub history: Vec<String>,
}

/// Tightens, certifies, and on failure at level `n` rebuilds from
/// `E ∪ ψⁱ(C) ∪ ψ⁻ⁱ(D)`, `0 ≤ i ≤ n+1`. The relative rank sum must drop
/// from round to round; otherwise the search has stalled.
pub fn minimize(
    t: &GraphTriple,
    psi: &Automorphism,
    max_level: usize,
    budget: Option<usize>,
    jobs: usize,
) -> Result<Minimized> {
    let input_rr = t.rr()?;
    let mut current = t.clone();
    let mut events = Vec::new();
    let mut history = Vec::new();
    let mut previous: Option<usize> = None;
    for round in 1.. {
        let xy = tighten_xy(&current, psi, budget)?;
        events.extend(xy.events);
        let zrun = tighten_z_capped(&xy.triple, psi, budget)?;
        events.extend(zrun.events);
        if !zrun.completed {
            return Err(Error::Budget { procedure: "tighten_Z", budget: budget.unwrap_or_else(|| crate::tightening::default_budget(&xy.triple)) });
        }
        let tight = zrun.triple.compacted();
        let report = certify_minimal(&tight, psi, max_level, jobs)?;
        let rr = report.rr;
        history.push(format!(
            "round {round}: rr=({}, {}) failed_level={}",
            rr.0,
            rr.1,
            report.failed_level.map_or("none".to_string(), |n| n.to_string())
        ));
        let sum = rr.0 + rr.1;
        if previous.is_some_and(|p| sum >= p) || (round == 1 && (rr.0 > input_rr.0 || rr.1 > input_rr.1)) {
            return Err(Error::Stall { rr, rounds: round, history });
        }
        previous = Some(sum);
        match report.failed_level {
            None => {
                return Ok(Minimized { triple: tight, report, rounds: round, events, history });
            }
            Some(n) => {
                let c = complements(&tight)?;
                let mut gens = c.e_basis.clone();
                for i in 0..=(n as i64 + 1) {
                    gens.extend(psi.apply_all(&c.c_basis, i)?);
                    gens.extend(psi.apply_all(&c.d_basis, -i)?);
                }
                current = initial_triple(&gens, psi)?;
            }
        }
    }
    unreachable!("the round loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::bouquet;
    use crate::words::w;

    fn psi1() -> Automorphism {
        Automorphism::parse(&["a", "abA"], &["a", "Aba"]).unwrap()
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn fz_injective_examples() {
        let t = GraphTriple::uniform(bouquet(2, &words(&["a", "a"])).unwrap()).unwrap();
        assert!(!fz_injective(&t).unwrap());
        let t = GraphTriple::uniform(bouquet(2, &words(&["ab", "b"])).unwrap()).unwrap();
        assert!(fz_injective(&t).unwrap());
    }

    #[test]
    fn complements_for_psi1() {
        let t = initial_triple(&words(&["b"]), &psi1()).unwrap();
        let c = complements(&t).unwrap();
        assert_eq!(c.e_basis, words(&["b"]));
        assert_eq!(c.c_basis, words(&["abA"]));
        assert_eq!(c.d_basis, words(&["Aba"]));
    }

    #[test]
    fn complements_of_uniform_triple() {
        let t = GraphTriple::uniform(bouquet(2, &words(&["a", "b"])).unwrap()).unwrap();
        let c = complements(&t).unwrap();
        assert!(c.c_basis.is_empty() && c.d_basis.is_empty());
        assert_eq!(c.e_basis, words(&["a", "b"]));
    }

    #[test]
    fn theta_examples() {
        let t = initial_triple(&words(&["b"]), &psi1()).unwrap();
        let c = complements(&t).unwrap();
        assert!(theta_n_injective(&c, &psi1(), 3).unwrap());
        assert_eq!(subgroup_rank(2, &theta_generators(&c, &psi1(), 3).unwrap()).unwrap(), 9);
        let id = Automorphism::identity(2);
        let dup = Complements { c_basis: words(&["a"]), d_basis: vec![], e_basis: words(&["a"]) };
        assert!(!theta_n_injective(&dup, &id, 0).unwrap());
        let empty = Complements { c_basis: vec![], d_basis: vec![], e_basis: words(&["a"]) };
        assert!((0..5).all(|n| theta_n_injective(&empty, &id, n).unwrap()));
    }

    #[test]
    fn certify_psi1() {
        let t = initial_triple(&words(&["b"]), &psi1()).unwrap();
        let r = certify_minimal(&t, &psi1(), 10, 1).unwrap();
        assert!(r.certified());
        assert_eq!((r.rr, r.chi), ((1, 1), Some(-1)));
        assert_eq!(certify_minimal(&t, &psi1(), 10, 3).unwrap(), r);
        let text = r.to_string();
        assert!(text.contains("checked_levels: 10\ninjective_up_to_N: true\n"));
    }

    #[test]
    fn presentation_for_psi1() {
        let t = initial_triple(&words(&["b"]), &psi1()).unwrap();
        let r = certify_minimal(&t, &psi1(), 10, 1).unwrap();
        let p = presentation(&t, &psi1(), &r).unwrap();
        assert_eq!(p.to_string(), "gens: b,abA,Aba,t\nrel: t^-1 b t = abA\nrel: t^-1 Aba t = b\n");
        assert_eq!(Presentation::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn trivial_subgroup_presentation() {
        let t = initial_triple(&[], &psi1()).unwrap();
        let r = certify_minimal(&t, &psi1(), 3, 1).unwrap();
        let p = presentation(&t, &psi1(), &r).unwrap();
        assert_eq!(p.to_string(), "gens: t\n");
        assert_eq!(Presentation::parse("gens: t\n").unwrap(), p);
    }

    #[test]
    fn rose_gives_the_defining_presentation() {
        let psi = Automorphism::parse(&["b", "ab"], &["bA", "a"]).unwrap();
        let t = GraphTriple::uniform(bouquet(2, &words(&["a", "b"])).unwrap()).unwrap();
        let r = certify_minimal(&t, &psi, 4, 1).unwrap();
        assert_eq!(r.chi, Some(0));
        let p = presentation(&t, &psi, &r).unwrap();
        assert_eq!(p, Presentation::defining(&psi));
        assert_eq!(p.to_string(), "gens: a,b,t\nrel: t^-1 a t = b\nrel: t^-1 b t = ab\n");
    }

    #[test]
    fn uncertified_presentation_is_refused() {
        let id = Automorphism::identity(2);
        let t = initial_triple(&words(&["a", "a"]), &id).unwrap();
        let r = certify_minimal(&t, &id, 2, 1).unwrap();
        assert!(!r.certified());
        assert!(matches!(presentation(&t, &id, &r), Err(Error::Uncertified(_))));
    }

    #[test]
    fn minimize_examples() {
        let m = minimize(&initial_triple(&words(&["b"]), &psi1()).unwrap(), &psi1(), 10, None, 1).unwrap();
        assert_eq!((m.report.rr, m.report.chi, m.rounds), ((1, 1), Some(-1), 1));
        let psi3 = Automorphism::parse(&["b", "ab"], &["bA", "a"]).unwrap();
        let m = minimize(&initial_triple(&words(&["a"]), &psi3).unwrap(), &psi3, 10, None, 1).unwrap();
        assert_eq!((m.report.rr, m.report.chi), ((0, 0), Some(0)));
        assert_eq!(m.triple.z().canonical_form(), bouquet(2, &words(&["a", "b"])).unwrap().canonical_form());
        let id = Automorphism::identity(2);
        let m = minimize(&initial_triple(&words(&["a", "b"]), &id).unwrap(), &id, 10, None, 1).unwrap();
        assert_eq!((m.report.rr, m.rounds), ((0, 0), 1));
    }

    #[test]
    fn minimize_rebuilds_when_theta_fails() {
        let t = initial_triple(&words(&["b", "aaaaabAAAAA"]), &psi1()).unwrap();
        let m = minimize(&t, &psi1(), 10, None, 1).unwrap();
        assert!(m.rounds >= 2, "{:?}", m.history);
        assert_eq!(m.report.rr, (1, 1));
        assert_eq!(m.report.chi, Some(-1));
    }
}
