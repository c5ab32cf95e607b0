use thiserror::Error;

/// Errors reported by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state must be non-negative and finite, got ({x}, {y})")]
    NegativeState { x: f64, y: f64 },

    #[error("value out of representable range: {0}")]
    OutOfRange(String),

    #[error("bracket [{lo}, {hi}] does not enclose a sign change")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("intersection count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("no feasible box: {0}")]
    Infeasible(String),

    #[error("box precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("order violated at iteration {iteration}: {detail}")]
    NonMonotoneDetected { iteration: usize, detail: String },

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    MaxIterExceeded { iterations: usize, last_change: f64 },

    #[error("point is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },

    #[error("2-cycle solver did not converge; last iterate ({z0}, {z1})")]
    NonConvergence { z0: f64, z1: f64 },

    #[error("shortcut contradicts Jury verdict: {0}")]
    ContradictionDetected(String),

    #[error("could not construct a witness box: {0}")]
    WitnessConstructionFailed(String),

    #[error("orbit overflowed at step {step}")]
    Overflow { step: usize },

    #[error("modulus does not cross 1 on [{from}, {to}]")]
    NoCrossing { from: f64, to: f64 },
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::NegativeState { .. }
                | Error::Infeasible(_)
                | Error::PreconditionViolated(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
