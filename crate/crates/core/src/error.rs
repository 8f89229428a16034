use thiserror::Error;

/// Errors raised by the barrier calculus, the step engine and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is not in the interior of the cone ({0})")]
    InteriorViolation(String),

    #[error("linear system is numerically singular (reciprocal condition estimate {rcond:.3e})")]
    Conditioning { rcond: f64 },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error(
        "damped Newton inversion did not converge after {iterations} iterations (decrement {decrement:.3e})"
    )]
    NoConvergence { iterations: usize, decrement: f64 },

    #[error("degenerate point: complementarity gap {mu:.3e} is not positive")]
    DegeneratePoint { mu: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("iteration invariant violated: {0}")]
    InvariantViolation(Box<InvariantBreach>),
}

/// Snapshot of the iterate when a phase invariant fails.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantBreach {
    pub iteration: usize,
    pub phase: &'static str,
    pub proximity: f64,
    pub bound: f64,
    pub mu: f64,
    pub xbar: Vec<f64>,
    pub y: Vec<f64>,
    pub sbar: Vec<f64>,
}

impl std::fmt::Display for InvariantBreach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "after {} step of iteration {}: proximity {:.6e} exceeds {:.6e} (mu = {:.6e})",
            self.phase, self.iteration, self.proximity, self.bound, self.mu
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
