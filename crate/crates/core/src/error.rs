//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate map Jacobian is singular: |det| = {min_det:.3e} at node {node:?}")]
    SingularJacobian { min_det: f64, node: (usize, usize) },

    #[error("requested derivative order {order} exceeds the grid budget {budget}")]
    ResolutionExceeded { order: usize, budget: usize },

    #[error("elliptic solve failed: {0}")]
    SolveFailure(String),

    #[error("coordinate condition violated: {0}")]
    ConditionViolation(String),

    #[error("tangential frame span check failed: min singular value {min_sv:.3e} at node {node:?}")]
    SpanFailure { min_sv: f64, node: (usize, usize) },

    #[error("operation requires a trajectory context (material derivative of a field path)")]
    MissingTrajectory,

    #[error("collar width {eps:.3e} is below the resolvable minimum {min_required:.3e}")]
    CollarTooThin { eps: f64, min_required: f64 },

    #[error("energy form is negative: <W, A W> = {value:.3e}")]
    NegativeEnergy { value: f64 },

    #[error("time step {dt:.3e} violates the CFL bound {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("energy blow-up at step {step}: E0 = {e0:.3e}")]
    EnergyBlowup { e0: f64, step: usize },

    #[error("Picard iteration is not contracting: last factors {factors:?}")]
    NoContraction { factors: Vec<f64> },

    #[error("approximate inverse residual {residual:.3e} exceeds tolerance")]
    InverseFailure { residual: f64 },

    #[error("iteration diverged at step {iter}")]
    Diverged { iter: usize },

    #[error("moment system is ill conditioned (cond ~ {cond:.3e}); try a larger support")]
    IllConditionedMoments { cond: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
