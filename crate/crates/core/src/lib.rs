//! Homogeneous self-dual predictor-corrector interior-point method for conic
//! programs over non-symmetric cones, together with a numerical verifier for
//! the inequalities its step-size analysis rests on.
//!
//! The solver only needs a barrier for the primal cone. Dual interiority is
//! certified through the proximity measure, never through a dual barrier.

// `!(x > t)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {:e})", $tol);
    }};
}

pub mod barrier;
pub mod error;
pub mod hsd;
pub mod io;
mod kkt;
pub mod solver;
pub mod step;
pub mod verify;

pub use barrier::{BarrierOracle, ConeSpec, LocalMetric, PrimitiveCone};
pub use error::{Error, Result};
pub use hsd::{ConicProblem, GMatrix, HsdPoint};
pub use solver::{solve, Preset, SolveOutcome, SolverParams, Status};
pub use step::{StepConstants, StepDirection, StepKind};
