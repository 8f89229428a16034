//! The two-variable LP and the two printed points on which the original
//! proximity bound after a predictor step and after a corrector step fails.
//!
//! The points are taken exactly as printed (four decimals). For each one the
//! step is recomputed, the original right-hand side `mu+ q^2 / (1 - q)^2` is
//! shown to be strictly exceeded, and the corrected bounds are shown to hold.

use nalgebra::{DMatrix, DVector};

use super::bounds::{corrector_proximity_bound, original_claim_bound, predictor_proximity_bound};
use super::{Accumulator, CheckReport, Relation};
use crate::barrier::{BarrierOracle, ConeSpec, PrimitiveCone};
use crate::error::Result;
use crate::hsd::{build_g, mu, proximity, psi, ConicProblem, HsdPoint};
use crate::step::{
    apply_step, corrector_direction_with, predictor_direction_with, step_constants, KktMethod, StepKind,
};

pub const FIXTURE_BETA: f64 = 0.30;
pub const FIXTURE_ETA: f64 = 0.15;
pub const FIXTURE_ALPHA_P: f64 = 0.052;
pub const FIXTURE_ALPHA_C: f64 = 1.0 / 84.0;

#[derive(Debug, Clone)]
pub struct CounterexampleFixture {
    pub problem: ConicProblem,
    pub beta: f64,
    pub eta: f64,
    pub alpha_p: f64,
    pub alpha_c: f64,
    pub predictor_point: HsdPoint,
    pub corrector_point: HsdPoint,
}

fn point(x: [f64; 2], tau: f64, y: f64, s: [f64; 2], kappa: f64) -> HsdPoint {
    HsdPoint::new(
        DVector::from_vec(vec![x[0], x[1], tau]),
        DVector::from_vec(vec![y]),
        DVector::from_vec(vec![s[0], s[1], kappa]),
    )
}

impl CounterexampleFixture {
    /// `min 2 x1 + 3 x2` s.t. `5 x1 - 3 x2 = 12`, `x >= 0`.
    pub fn new() -> Self {
        let problem = ConicProblem::new(
            DMatrix::from_row_slice(1, 2, &[5.0, -3.0]),
            DVector::from_vec(vec![12.0]),
            DVector::from_vec(vec![2.0, 3.0]),
            ConeSpec::new(vec![PrimitiveCone::Nonnegative(2)]),
        )
        .expect("fixture problem is well formed");
        Self {
            problem,
            beta: FIXTURE_BETA,
            eta: FIXTURE_ETA,
            alpha_p: FIXTURE_ALPHA_P,
            alpha_c: FIXTURE_ALPHA_C,
            predictor_point: point([0.9310, 0.6995], 0.8511, 0.0224, [0.8246, 1.0891], 0.9023),
            corrector_point: point([0.9830, 0.9304], 0.9670, 0.0042, [0.9650, 1.0176], 0.9810),
        }
    }
}

impl Default for CounterexampleFixture {
    fn default() -> Self {
        Self::new()
    }
}

/// Both sides of the original claim after one step from a fixture point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: StepKind,
    pub alpha: f64,
    /// Proximity of the starting point.
    pub proximity: f64,
    pub mu_plus: f64,
    /// `mu+^{-1} ||sbar+ + mu+ gbar(xbar)||*_xbar` at the old `xbar`.
    pub q: f64,
    /// `||psi(xbar+, sbar+, mu+)||*_{xbar+}`.
    pub lhs: f64,
    /// `mu+ q^2 / (1 - q)^2`.
    pub rhs: f64,
    /// Proximity after the step, `lhs / mu+`.
    pub proximity_plus: f64,
}

impl Violation {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn reproduced(&self) -> bool {
        self.q < 1.0 && self.lhs > self.rhs
    }
}

/// One step of `kind` with step size `alpha` from `z`, evaluated against the
/// original claim.
pub fn evaluate_step(problem: &ConicProblem, z: &HsdPoint, kind: StepKind, alpha: f64) -> Result<Violation> {
    let g = build_g(problem)?;
    let fbar = problem.homogenized_barrier()?;
    let dz = match kind {
        StepKind::Predictor => predictor_direction_with(KktMethod::Full, &g, z, &fbar)?,
        StepKind::Corrector => corrector_direction_with(KktMethod::Full, &g, z, &fbar)?,
    };
    let zp = apply_step(z, &dz, alpha);
    let mu_plus = mu(&zp, fbar.nu());
    let old = fbar.local_metric(z.xbar.as_slice())?;
    let q = old.dual_norm(&psi(&z.xbar, &zp.sbar, mu_plus, &fbar)?) / mu_plus;
    let new = fbar.local_metric(zp.xbar.as_slice())?;
    let lhs = new.dual_norm(&psi(&zp.xbar, &zp.sbar, mu_plus, &fbar)?);
    Ok(Violation {
        kind,
        alpha,
        proximity: proximity(z, &fbar)?,
        mu_plus,
        q,
        lhs,
        rhs: original_claim_bound(mu_plus, q),
        proximity_plus: lhs / mu_plus,
    })
}

#[derive(Debug, Clone)]
pub struct CounterexampleOutcome {
    pub predictor: Violation,
    pub corrector: Violation,
    reports: Vec<CheckReport>,
}

impl CounterexampleOutcome {
    pub fn reports(&self) -> Vec<CheckReport> {
        self.reports.clone()
    }

    pub fn both_reproduced(&self) -> bool {
        self.predictor.reproduced() && self.corrector.reproduced()
    }
}

fn exact(id: &str, instance: &str, lhs: f64, rhs: f64) -> CheckReport {
    let mut acc = Accumulator::new(id, instance);
    acc.observe_with(lhs, rhs, 0.0);
    acc.finish()
}

fn strict(id: &str, instance: &str, lhs: f64, rhs: f64) -> CheckReport {
    let mut acc = Accumulator::with_relation(id, instance, Relation::Exceeds);
    acc.observe_with(lhs, rhs, 0.0);
    acc.finish()
}

/// Deterministic reproduction on the fixture: neighborhood membership, the
/// step-size conditions on `alpha_p`, both violations (with `q < 1`), and
/// the corrected bounds on the same steps.
pub fn reproduce_counterexamples() -> Result<CounterexampleOutcome> {
    reproduce_on(&CounterexampleFixture::new())
}

pub fn reproduce_on(fx: &CounterexampleFixture) -> Result<CounterexampleOutcome> {
    let fbar: BarrierOracle = fx.problem.homogenized_barrier()?;
    let nubar = fbar.nu();
    let k = step_constants(fx.eta, nubar)?;
    let pred = evaluate_step(&fx.problem, &fx.predictor_point, StepKind::Predictor, fx.alpha_p)?;
    let corr = evaluate_step(&fx.problem, &fx.corrector_point, StepKind::Corrector, fx.alpha_c)?;

    let p_inst = "predictor-point";
    let c_inst = "corrector-point";
    let reports = vec![
        exact(
            "counterexample.predictor.membership",
            p_inst,
            pred.proximity,
            fx.eta,
        ),
        exact(
            "counterexample.predictor.alpha_kappa_x",
            p_inst,
            fx.alpha_p,
            1.0 / k.kappa_x,
        ),
        exact(
            "counterexample.predictor.alpha_kappa_s",
            p_inst,
            fx.alpha_p,
            (1.0 - fx.eta) / k.kappa_s,
        ),
        exact(
            "counterexample.predictor.alpha_nubar",
            p_inst,
            fx.alpha_p,
            1.0 / (11.0 * nubar.sqrt()),
        ),
        exact(
            "counterexample.predictor.q_below_one",
            p_inst,
            pred.q,
            1.0 - f64::EPSILON,
        ),
        strict("counterexample.predictor.violation", p_inst, pred.lhs, pred.rhs),
        exact(
            "counterexample.predictor.corrected_bound",
            p_inst,
            pred.proximity_plus,
            predictor_proximity_bound(fx.alpha_p * k.kappa_x, fx.eta),
        ),
        exact(
            "counterexample.corrector.membership",
            c_inst,
            corr.proximity,
            fx.beta,
        ),
        exact(
            "counterexample.corrector.q_below_one",
            c_inst,
            corr.q,
            1.0 - f64::EPSILON,
        ),
        strict("counterexample.corrector.violation", c_inst, corr.lhs, corr.rhs),
        exact(
            "counterexample.corrector.corrected_bound",
            c_inst,
            corr.proximity_plus,
            corrector_proximity_bound(fx.beta, fx.alpha_c),
        ),
    ];
    Ok(CounterexampleOutcome {
        predictor: pred,
        corrector: corr,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_violations_reproduce() {
        let out = reproduce_counterexamples().unwrap();
        assert!(out.both_reproduced(), "{out:?}");
        for r in out.reports() {
            assert!(r.pass, "{}", r.record());
        }
    }

    #[test]
    fn reproduction_is_bit_stable() {
        let a = reproduce_counterexamples().unwrap();
        let b = reproduce_counterexamples().unwrap();
        assert_eq!(a.predictor, b.predictor);
        assert_eq!(a.corrector, b.corrector);
    }

    #[test]
    fn zero_step_has_no_violation_at_centre() {
        // At a central point with alpha = 0 both sides vanish.
        let fx = CounterexampleFixture::new();
        let fbar = fx.problem.homogenized_barrier().unwrap();
        let xbar = DVector::from_vec(vec![1.0, 2.0, 0.5]);
        let sbar = -fbar.gradient(xbar.as_slice()).unwrap();
        let z = HsdPoint::new(xbar, DVector::from_vec(vec![0.0]), sbar);
        let v = evaluate_step(&fx.problem, &z, StepKind::Corrector, 0.0).unwrap();
        assert!(v.lhs.abs() < 1e-14 && v.q.abs() < 1e-14);
        assert!(!v.reproduced());
    }
}
