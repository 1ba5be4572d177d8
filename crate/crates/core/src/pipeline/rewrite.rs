//! Reading ambient words as products of a fixed family of symbol words.
//!
//! The wedge of petals spelling the symbols is folded while every edge
//! carries a second label in the free group on the symbols. A fold first
//! gauges one far endpoint so the two edges agree on that label. Closed
//! paths at the basepoint keep their symbol product throughout, so after
//! folding the product along a traced word is its expression.

use crate::error::{Error, Result};
use crate::graphs::{LabeledGraph, OrientedEdge, VertexId};
use crate::words::{Letter, Word};

#[derive(Debug, Clone)]
pub struct Rewriter {
    graph: LabeledGraph,
    mu: Vec<Word>,
    symbol_count: usize,
}

impl Rewriter {
    /// Fails when the symbols do not freely generate, naming the relation
    /// found.
    pub fn new(rank: usize, symbols: &[Word]) -> Result<Rewriter> {
        let mut graph = LabeledGraph::point(rank);
        let base = graph.basepoint().expect("pointed");
        let mut mu = Vec::new();
        for (k, s) in symbols.iter().enumerate() {
            s.check_alphabet(rank)?;
            if s.is_empty() {
                return Err(Error::CertificateIncomplete(format!("symbol {k} is trivial")));
            }
            let letters = s.letters();
            let mut cur = base;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { base } else { graph.add_vertex() };
                graph.add_letter_edge(cur, next, l);
                let label = if i == 0 { Word::generator(k) } else { Word::identity() };
                mu.push(if l.inverse { label.inverse() } else { label });
                cur = next;
            }
        }
        let mut r = Rewriter { graph, mu, symbol_count: symbols.len() };
        r.fold_all()?;
        Ok(r)
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    fn label(&self, oe: OrientedEdge) -> Word {
        if oe.forward {
            self.mu[oe.edge].clone()
        } else {
            self.mu[oe.edge].inverse()
        }
    }

    fn gauge(&mut self, u: VertexId, g: &Word) {
        let ginv = g.inverse();
        for (e, edge) in self.graph.edges() {
            if edge.origin == u {
                self.mu[e] = ginv.concat(&self.mu[e]);
            }
            if edge.terminus == u {
                self.mu[e] = self.mu[e].concat(g);
            }
        }
    }

    fn fold_all(&mut self) -> Result<()> {
        let base = self.graph.basepoint();
        while let Some((e1, e2)) = self.graph.first_clash() {
            let w1 = self.graph.terminus(e1);
            let w2 = self.graph.terminus(e2);
            let (m1, m2) = (self.label(e1), self.label(e2));
            if w1 == w2 {
                if m1 != m2 {
                    return Err(Error::CertificateIncomplete(format!(
                        "symbols satisfy a relation: {}",
                        symbol_text(&m1.concat(&m2.inverse()))
                    )));
                }
            } else if Some(w2) != base {
                self.gauge(w2, &m2.inverse().concat(&m1));
            } else {
                self.gauge(w1, &m1.inverse().concat(&m2));
            }
            debug_assert_eq!(self.label(e1), self.label(e2));
            self.graph.fold_oriented(e1, e2);
        }
        Ok(())
    }

    /// The expression of `w` over the symbols, as a word whose generator
    /// `k` is symbol `k`, or `None` if `w` is outside their span.
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let base = self.graph.basepoint()?;
        let mut v = base;
        let mut out = Word::identity();
        for &l in w.letters() {
            let oe = self.graph.outgoing(v).into_iter().find(|&oe| self.graph.letter(oe) == l)?;
            out = out.concat(&self.label(oe));
            v = self.graph.terminus(oe);
        }
        (v == base).then_some(out)
    }
}

/// Symbol words printed as `s0 s1^-1 ...`.
pub fn symbol_text(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = w
        .letters()
        .iter()
        .map(|l: &Letter| if l.inverse { format!("s{}^-1", l.index()) } else { format!("s{}", l.index()) })
        .collect();
    parts.join(" ")
}
