use num_complex::Complex64;
use thiserror::Error;

/// Failures surfaced by the solver, the oracle and the root finders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("mu = 0 is the trivial constant mode and is excluded from the k = 0 solver (s = {0})")]
    TrivialEigenvalue(Complex64),

    #[error("non-finite boundary matrix entry at s = {s} (M = {m}); reduce M or x0")]
    NonFinite { s: Complex64, m: usize },

    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    NoConvergence { iterations: usize, last: Complex64 },

    #[error("complex seed {seed} collapsed back to the real axis at {root}")]
    SeedRejected { seed: Complex64, root: Complex64 },

    #[error("shooting integration became unstable at x = {x}")]
    StepUnstable { x: f64 },
}

pub type Result<T> = std::result::Result<T, SpectraError>;
