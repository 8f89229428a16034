//! Predictor and corrector directions, step-size rules and the step update.
//!
//! Predictor:
//! ```text
//! G (dy; dxbar) - (0; dsbar) = -(G (y; xbar) - (0; sbar))
//!        dsbar + mu H dxbar  = -sbar
//! ```
//! Corrector:
//! ```text
//! G (dy; dxbar) - (0; dsbar) = 0
//!        dsbar + mu H dxbar  = -psi(xbar, sbar, mu)
//! ```

use nalgebra::DVector;

use crate::barrier::{BarrierOracle, LocalMetric};
use crate::error::{Error, Result};
use crate::hsd::{in_neighborhood, mu, psi, residual, GMatrix, HsdPoint};
use crate::kkt;

pub use crate::kkt::KktMethod;

/// Number of backtracking trials in [`line_search_predictor`].
pub const LINE_SEARCH_TRIALS: usize = 60;
/// Geometric shrink factor of the line-search grid.
pub const LINE_SEARCH_SHRINK: f64 = 0.9;
/// The line search starts at this fraction of `1 / kappa_x`.
pub const LINE_SEARCH_CAP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Predictor,
    Corrector,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Predictor => "predictor",
            StepKind::Corrector => "corrector",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDirection {
    pub dxbar: DVector<f64>,
    pub dy: DVector<f64>,
    pub dsbar: DVector<f64>,
    pub kind: StepKind,
}

impl StepDirection {
    pub fn zero(z: &HsdPoint, kind: StepKind) -> Self {
        Self {
            dxbar: DVector::zeros(z.xbar.len()),
            dy: DVector::zeros(z.y.len()),
            dsbar: DVector::zeros(z.sbar.len()),
            kind,
        }
    }
}

/// `kappa_x = eta + sqrt(2 eta^2 + nubar)`,
/// `kappa_s = kappa_x + sqrt(kappa_x^2 + eta^2 + nubar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConstants {
    pub kappa_x: f64,
    pub kappa_s: f64,
    pub eta: f64,
    pub nubar: f64,
}

pub fn step_constants(eta: f64, nubar: f64) -> Result<StepConstants> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Parameter(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(nubar >= 2.0) {
        return Err(Error::Parameter(format!("nubar must be at least 2, got {nubar}")));
    }
    let kappa_x = eta + (2.0 * eta * eta + nubar).sqrt();
    let kappa_s = kappa_x + (kappa_x * kappa_x + eta * eta + nubar).sqrt();
    Ok(StepConstants {
        kappa_x,
        kappa_s,
        eta,
        nubar,
    })
}

/// Fixed predictor step `c_p / kappa_x` with `c_p = 0.020` (preset 1) or
/// `0.025` (preset 2).
pub fn fixed_predictor_alpha(preset: u8, constants: &StepConstants) -> Result<f64> {
    let cp = match preset {
        1 => 0.020,
        2 => 0.025,
        other => return Err(Error::Parameter(format!("unknown preset {other}"))),
    };
    Ok(cp / constants.kappa_x)
}

fn direction(
    method: KktMethod,
    g: &GMatrix,
    z: &HsdPoint,
    fbar: &BarrierOracle,
    kind: StepKind,
) -> Result<(StepDirection, LocalMetric)> {
    let metric = fbar.local_metric(z.xbar.as_slice())?;
    let m = mu(z, fbar.nu());
    if !(m > 0.0) {
        return Err(Error::DegeneratePoint { mu: m });
    }
    let (r1, r2) = match kind {
        StepKind::Predictor => (-residual(g, z), -&z.sbar),
        StepKind::Corrector => (
            DVector::zeros(g.m() + g.n() + 1),
            -psi(&z.xbar, &z.sbar, m, fbar)?,
        ),
    };
    let sol = kkt::solve(method, g, &metric, m, &r1, &r2)?;
    Ok((
        StepDirection {
            dxbar: sol.dxbar,
            dy: sol.dy,
            dsbar: sol.dsbar,
            kind,
        },
        metric,
    ))
}

pub fn predictor_direction(g: &GMatrix, z: &HsdPoint, fbar: &BarrierOracle) -> Result<StepDirection> {
    predictor_direction_with(KktMethod::default(), g, z, fbar)
}

pub fn predictor_direction_with(
    method: KktMethod,
    g: &GMatrix,
    z: &HsdPoint,
    fbar: &BarrierOracle,
) -> Result<StepDirection> {
    direction(method, g, z, fbar, StepKind::Predictor).map(|d| d.0)
}

pub fn corrector_direction(g: &GMatrix, z: &HsdPoint, fbar: &BarrierOracle) -> Result<StepDirection> {
    corrector_direction_with(KktMethod::default(), g, z, fbar)
}

pub fn corrector_direction_with(
    method: KktMethod,
    g: &GMatrix,
    z: &HsdPoint,
    fbar: &BarrierOracle,
) -> Result<StepDirection> {
    direction(method, g, z, fbar, StepKind::Corrector).map(|d| d.0)
}

/// Relative residuals of the two block equations defining `dz`:
/// `(||block1|| / scale1, ||block2|| / scale2)` where each scale is the norm
/// of the largest term in that block (at least 1e-300).
pub fn system_residuals(
    g: &GMatrix,
    z: &HsdPoint,
    fbar: &BarrierOracle,
    dz: &StepDirection,
) -> Result<(f64, f64)> {
    let metric = fbar.local_metric(z.xbar.as_slice())?;
    let m = mu(z, fbar.nu());
    let (r1, r2) = match dz.kind {
        StepKind::Predictor => (-residual(g, z), -&z.sbar),
        StepKind::Corrector => (
            DVector::zeros(g.m() + g.n() + 1),
            -psi(&z.xbar, &z.sbar, m, fbar)?,
        ),
    };
    let gd = g.apply(&dz.dy, &dz.dxbar);
    let mut lhs1 = gd.clone();
    {
        let mut tail = lhs1.rows_mut(g.m(), dz.dsbar.len());
        tail -= &dz.dsbar;
    }
    let hdx = metric.apply_hessian(&dz.dxbar) * m;
    let lhs2 = &dz.dsbar + &hdx;
    let scale1 = gd.norm().max(dz.dsbar.norm()).max(r1.norm()).max(1e-300);
    let scale2 = dz.dsbar.norm().max(hdx.norm()).max(r2.norm()).max(1e-300);
    Ok(((lhs1 - r1).norm() / scale1, (lhs2 - r2).norm() / scale2))
}

/// `z + alpha dz`, componentwise.
pub fn apply_step(z: &HsdPoint, dz: &StepDirection, alpha: f64) -> HsdPoint {
    HsdPoint::new(
        &z.xbar + &dz.dxbar * alpha,
        &z.y + &dz.dy * alpha,
        &z.sbar + &dz.dsbar * alpha,
    )
}

/// Largest `alpha` on the grid `0.99 kappa_x^{-1} 0.9^k`, `k = 0..=60`, for
/// which `z + alpha dz` lies in `N(beta)`. Never returns less than
/// `fallback`, the fixed step of the active preset.
pub fn line_search_predictor(
    z: &HsdPoint,
    dz: &StepDirection,
    beta: f64,
    fbar: &BarrierOracle,
    constants: &StepConstants,
    fallback: f64,
) -> f64 {
    let alpha_max = LINE_SEARCH_CAP / constants.kappa_x;
    let mut alpha = alpha_max;
    for _ in 0..=LINE_SEARCH_TRIALS {
        if alpha <= fallback {
            break;
        }
        if in_neighborhood(&apply_step(z, dz, alpha), beta, fbar) {
            return alpha;
        }
        alpha *= LINE_SEARCH_SHRINK;
    }
    fallback
}
