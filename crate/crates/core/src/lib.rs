//! Graph-triple folding for subgroups of free-by-cyclic groups.
//!
//! A free-by-cyclic group `F ⋊_ψ Z` is presented by an automorphism `ψ` of a
//! free group `F` of finite rank. A finitely generated subgroup `H = ⟨L, t⟩`
//! containing the stable letter is studied through graph triples `(Z, Y, X)`
//! labeled over the rose: graphs whose images satisfy
//! `Y# = ⟨(X∩Y)#, ψ((X∩Y)#)⟩` and `X# = ⟨(X∩Y)#, ψ⁻¹((X∩Y)#)⟩`.
//!
//! The crate is layered bottom-up:
//!
//! * [`words`]: reduced words and automorphisms with inverse tables.
//! * [`graphs`]: Stallings folding, cores, subgroup graphs, membership.
//! * [`triples`]: graph triples with per-cell membership flags, relative
//!   ranks, invariance predicates and the initial triple for `⟨L, t⟩`.
//! * [`tightening`]: fold classification, folding and adding loops, and the
//!   tightening procedures.
//! * [`certify`]: complements, injectivity levels, minimality reports, HNN
//!   presentations and the minimization loop.
//! * [`pipeline`]: free-product decomposition certificates and the embedding
//!   into a finitely generated free-by-cyclic group.

pub mod certify;
pub mod error;
pub mod graphs;
pub mod pipeline;
pub mod tightening;
pub mod triples;
pub mod words;

pub use error::{Error, Result};
pub use graphs::{LabeledGraph, SubgroupGraph};
pub use triples::GraphTriple;
pub use words::{Automorphism, Letter, Word};
