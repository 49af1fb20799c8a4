//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by grid construction, solvers and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid specification cannot be realised (bad extents, too coarse, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A requested region sticks out of the computational domain.
    #[error("region extends outside the grid: {0}")]
    RegionOutOfDomain(String),

    /// Solver parameters out of range (tolerance, relaxation factor, ...).
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    /// The reaction scale is not resolved by the mesh; the face stencil
    /// needs epsilon >= 2h to keep the ghost-node elimination stable.
    #[error("epsilon = {epsilon} under-resolved: the face stencil requires epsilon >= 2h = {min}")]
    EpsilonUnderResolved { epsilon: f64, min: f64 },

    /// A sweep produced a non-finite value; the iteration was aborted.
    #[error("solver diverged: non-finite field value at sweep {sweep}")]
    SolverDiverged { sweep: usize },

    /// Boundary data missing or out of the admissible range.
    #[error("invalid boundary data: {0}")]
    InvalidData(String),

    /// A test vector field violates a structural requirement
    /// (tangency on the reaction face, support away from Dirichlet faces).
    #[error("invalid test field `{label}`: {reason}")]
    InvalidTestField { label: String, reason: String },

    /// Analysis input does not satisfy a documented precondition.
    #[error("invalid analysis input: {0}")]
    InvalidAnalysis(String),

    /// A matrix handed to the varifold algebra is not symmetric.
    #[error("matrix is not symmetric: max asymmetry {max_asym:e} exceeds 1e-12")]
    NotSymmetric { max_asym: f64 },

    /// Reading or writing an artifact failed.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
