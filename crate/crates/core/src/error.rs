use thiserror::Error;

use crate::chords::AbabWitness;
use crate::embedding::EmbeddingError;
use crate::system::{CrossingWitness, SystemError};
use crate::regions::RegionError;
use crate::solver::SolverError;
use crate::verify::VerifyError;

/// Input that does not meet an operation's precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractViolation {
    #[error("system is not cross-free: {0}")]
    Crossing(CrossingWitness),
    #[error("cycle system is not abab-free: {0}")]
    NotAbabFree(AbabWitness),
    #[error("a red/blue coloring is required")]
    MissingColoring,
    #[error("a K family is required")]
    MissingK,
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("contract violation: {0}")]
    Contract(#[from] ContractViolation),
    #[error("step budget of {budget} rewrites exhausted during {stage}")]
    BudgetExhausted { budget: usize, stage: &'static str },
    #[error("{what} has size {got}, above the limit of {limit}")]
    SizeGuard { what: &'static str, got: usize, limit: usize },
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
