use thiserror::Error;

use crate::pcg::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Structural PCG violations; the list is never empty.
    #[error("invalid PCG: {}", format_violations(.0))]
    InvalidPcg(Vec<Violation>),

    #[error("B-term {term} violates the support condition against edge {edge}: it lies inside the edge")]
    BTermSupport { edge: usize, term: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not found: {0}")]
    NotFound(String),

    /// Two independent evidence channels disagreed. Should never happen.
    #[error("internal cross-check divergence: {0}")]
    CrossCheck(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
