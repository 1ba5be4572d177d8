use thiserror::Error;

use crate::graphs::GraphError;
use crate::words::WordError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed triple: {0}")]
    Structure(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A checked invariant failed after a step that should preserve it.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("{procedure}: step budget of {budget} exhausted")]
    Budget { procedure: &'static str, budget: usize },
    #[error("minimization stalled at relative ranks {rr:?} after {rounds} rounds")]
    Stall { rr: (usize, usize), rounds: usize, history: Vec<String> },
    #[error("certificate incomplete: {0}")]
    CertificateIncomplete(String),
    #[error("input is not certified: {0}")]
    Uncertified(String),
}
