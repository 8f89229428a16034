//! The predictor-corrector loop: start at a perfectly centered point, take one
//! predictor step into `N(beta)`, then `r_c` corrector steps back into
//! `N(eta)`, until the gap and the residual have both shrunk by `eps`.

use std::time::Instant;

use nalgebra::DVector;

use crate::barrier::BarrierOracle;
use crate::error::{Error, InvariantBreach, Result};
use crate::hsd::{build_g, mu, proximity_or_inf, residual, ConicProblem, GMatrix, HsdPoint};
use crate::step::{
    apply_step, corrector_direction_with, fixed_predictor_alpha, line_search_predictor,
    predictor_direction_with, step_constants, KktMethod, StepConstants, StepKind,
};

/// The two parameter sets for which the step analysis is proved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `beta = 0.20`, `epsilon = 0.50`, `r_c = 1`, `alpha_p = 0.020 / kappa_x`.
    One,
    /// `beta = 0.25`, `epsilon = 0.70`, `r_c = 2`, `alpha_p = 0.025 / kappa_x`.
    Two,
}

impl Preset {
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Preset::One),
            2 => Ok(Preset::Two),
            other => Err(Error::Parameter(format!("unknown preset {other}"))),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Preset::One => 1,
            Preset::Two => 2,
        }
    }

    /// Predictor target neighborhood.
    pub fn beta(self) -> f64 {
        match self {
            Preset::One => 0.20,
            Preset::Two => 0.25,
        }
    }

    /// Per-corrector contraction factor of the proximity.
    pub fn contraction(self) -> f64 {
        match self {
            Preset::One => 0.50,
            Preset::Two => 0.70,
        }
    }

    pub fn corrector_steps(self) -> usize {
        match self {
            Preset::One => 1,
            Preset::Two => 2,
        }
    }

    /// `eta = beta * epsilon^{r_c}`.
    pub fn eta(self) -> f64 {
        self.beta() * self.contraction().powi(self.corrector_steps() as i32)
    }

    /// `c_p = alpha_p * kappa_x`.
    pub fn predictor_scale(self) -> f64 {
        match self {
            Preset::One => 0.020,
            Preset::Two => 0.025,
        }
    }

    pub fn corrector_alpha(self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub preset: Preset,
    /// Relative reduction required of both the gap and the residual.
    pub eps: f64,
    /// `None` uses ten times [`iteration_bound_estimate`].
    pub max_iters: Option<usize>,
    pub line_search: bool,
    pub tau_kappa_ratio_tol: f64,
    pub kkt: KktMethod,
    /// Experimental override of the number of corrector steps. No
    /// neighborhood guarantee is claimed; only `N(beta)` is enforced after
    /// the corrector phase.
    pub corrector_steps: Option<usize>,
    /// Raise [`Error::InvariantViolation`] when an iterate leaves its
    /// neighborhood.
    pub check_invariants: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            preset: Preset::One,
            eps: 1e-8,
            max_iters: None,
            line_search: false,
            tau_kappa_ratio_tol: 1e-6,
            kkt: KktMethod::Reduced,
            corrector_steps: None,
            check_invariants: true,
        }
    }
}

impl SolverParams {
    pub fn with_preset(preset: Preset) -> Self {
        Self {
            preset,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Parameter(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        if !(self.tau_kappa_ratio_tol > 0.0) {
            return Err(Error::Parameter("tau/kappa tolerance must be positive".into()));
        }
        if self.corrector_steps == Some(0) {
            return Err(Error::Parameter("at least one corrector step is required".into()));
        }
        Ok(())
    }

    /// Relative tolerance used to verify recovered solutions and certificates.
    pub fn verify_tolerance(&self) -> f64 {
        self.eps.sqrt().max(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IllPosed,
    IterationLimit,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::PrimalInfeasible => "primal-infeasible",
            Status::DualInfeasible => "dual-infeasible",
            Status::IllPosed => "ill-posed",
            Status::IterationLimit => "iteration-limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub phase: StepKind,
    pub alpha: f64,
    pub mu: f64,
    pub residual_norm: f64,
    pub proximity_before: f64,
    pub proximity_after: f64,
    pub kappa_x: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Primal-dual solution of `(P)/(D)` recovered by dividing by `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub s: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

/// Infeasibility certificate, normalized to unit infinity norm.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `A^T y + s = 0`, `s in K*`, `b^T y > 0`: no feasible `x`.
    PrimalInfeasibility {
        y: DVector<f64>,
        s: DVector<f64>,
        evidence: f64,
        violation: f64,
    },
    /// `A x = 0`, `x in K`, `c^T x < 0`: no feasible `(y, s)`.
    DualInfeasibility {
        x: DVector<f64>,
        evidence: f64,
        violation: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub status: Status,
    pub solution: Option<Solution>,
    pub certificate: Option<Certificate>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    pub solution: Option<Solution>,
    pub certificate: Option<Certificate>,
    pub diagnostics: Vec<String>,
    pub mu: f64,
    pub mu0: f64,
    pub residual_norm: f64,
    pub residual_norm0: f64,
    pub iterations: usize,
    pub tau: f64,
    pub kappa: f64,
    /// Relative tolerance the solution or certificate was verified to.
    pub tolerance: f64,
    pub point: HsdPoint,
    pub trace: IterationTrace,
}

/// Canonical start: the anchor of each cone (`-g(x) = x`), `tau = 1`,
/// `sbar = -gbar(xbar)`, `y = 0`. Then `mu = 1` and `psi = 0`.
pub fn initial_point(p: &ConicProblem, fbar: &BarrierOracle) -> Result<HsdPoint> {
    let xbar = fbar.anchor();
    if xbar.len() != p.n() + 1 {
        return Err(Error::Configuration(
            "homogenized barrier does not match the problem dimension".into(),
        ));
    }
    let sbar = -fbar.gradient(xbar.as_slice())?;
    Ok(HsdPoint::new(xbar, DVector::zeros(p.m()), sbar))
}

/// Reference quantities at the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartReference {
    pub mu0: f64,
    pub residual0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Converged,
}

/// `mu(z) <= eps mu(z0)` and `||r(z)|| <= eps ||r(z0)||`; when the start is
/// already feasible the residual test is vacuous.
pub fn check_termination(
    g: &GMatrix,
    z: &HsdPoint,
    start: &StartReference,
    nubar: f64,
    eps: f64,
) -> Termination {
    let gap_ok = mu(z, nubar) <= eps * start.mu0;
    let res_ok = start.residual0 == 0.0 || residual(g, z).norm() <= eps * start.residual0;
    if gap_ok && res_ok {
        Termination::Converged
    } else {
        Termination::Continue
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// Reads off an optimal solution or an infeasibility certificate from the
/// final `tau` and `kappa`.
///
/// `tau` must dominate (`tau >= tol max(1, kappa)` and `tau > kappa`) for an
/// optimal label, `kappa` likewise for an infeasibility label; anything else,
/// including a tie, is ill-posed. Every label is verified to `verify_tol`.
pub fn classify_solution(z: &HsdPoint, p: &ConicProblem, tol: f64, verify_tol: f64) -> Classification {
    let tau = z.tau();
    let kappa = z.kappa();
    let x = z.x().into_owned();
    let s = z.s().into_owned();
    let y = z.y.clone();
    let mut diagnostics = Vec::new();

    if tau >= tol * kappa.max(1.0) && tau > kappa {
        let x = x / tau;
        let y = y / tau;
        let s = s / tau;
        let primal_objective = p.c.dot(&x);
        let dual_objective = p.b.dot(&y);
        let primal_residual = inf_norm(&(&p.a * &x - &p.b)) / (1.0 + inf_norm(&p.b));
        let dual_residual = inf_norm(&(p.a.tr_mul(&y) + &s - &p.c)) / (1.0 + inf_norm(&p.c));
        let gap =
            (primal_objective - dual_objective).abs() / (1.0 + primal_objective.abs() + dual_objective.abs());
        let sol = Solution {
            x,
            y,
            s,
            primal_objective,
            dual_objective,
            primal_residual,
            dual_residual,
            gap,
        };
        if primal_residual <= verify_tol && dual_residual <= verify_tol && gap <= verify_tol {
            return Classification {
                status: Status::Optimal,
                solution: Some(sol),
                certificate: None,
                diagnostics,
            };
        }
        diagnostics.push(format!(
            "scaled solution fails verification: primal residual {primal_residual:.3e}, \
             dual residual {dual_residual:.3e}, gap {gap:.3e} (tolerance {verify_tol:.1e})"
        ));
        return Classification {
            status: Status::IllPosed,
            solution: Some(sol),
            certificate: None,
            diagnostics,
        };
    }

    if kappa >= tol * tau.max(1.0) && kappa > tau {
        let ys_scale = inf_norm(&y).max(inf_norm(&s));
        let x_scale = inf_norm(&x);
        let primal_evidence = if ys_scale > 0.0 {
            p.b.dot(&y) / ys_scale
        } else {
            0.0
        };
        let dual_evidence = if x_scale > 0.0 {
            -p.c.dot(&x) / x_scale
        } else {
            0.0
        };
        if primal_evidence <= 0.0 && dual_evidence <= 0.0 {
            diagnostics.push(format!(
                "kappa dominates tau but neither b^T y ({primal_evidence:.3e}) nor -c^T x \
                 ({dual_evidence:.3e}) is positive"
            ));
            return Classification {
                status: Status::IllPosed,
                solution: None,
                certificate: None,
                diagnostics,
            };
        }
        if primal_evidence >= dual_evidence {
            let y = y / ys_scale;
            let s = s / ys_scale;
            let violation = inf_norm(&(p.a.tr_mul(&y) + &s));
            let cert = Certificate::PrimalInfeasibility {
                y,
                s,
                evidence: primal_evidence,
                violation,
            };
            if violation <= verify_tol * primal_evidence {
                return Classification {
                    status: Status::PrimalInfeasible,
                    solution: None,
                    certificate: Some(cert),
                    diagnostics,
                };
            }
            diagnostics.push(format!(
                "primal infeasibility certificate fails: ||A^T y + s|| = {violation:.3e}, \
                 b^T y = {primal_evidence:.3e}"
            ));
            return Classification {
                status: Status::IllPosed,
                solution: None,
                certificate: Some(cert),
                diagnostics,
            };
        }
        let x = x / x_scale;
        let violation = inf_norm(&(&p.a * &x));
        let in_cone = p.barrier().map(|f| f.contains(x.as_slice())).unwrap_or(false);
        let cert = Certificate::DualInfeasibility {
            x,
            evidence: dual_evidence,
            violation,
        };
        if in_cone && violation <= verify_tol * dual_evidence {
            return Classification {
                status: Status::DualInfeasible,
                solution: None,
                certificate: Some(cert),
                diagnostics,
            };
        }
        diagnostics.push(format!(
            "dual infeasibility certificate fails: ||A x|| = {violation:.3e}, \
             -c^T x = {dual_evidence:.3e}, x in K: {in_cone}"
        ));
        return Classification {
            status: Status::IllPosed,
            solution: None,
            certificate: Some(cert),
            diagnostics,
        };
    }

    diagnostics.push(format!(
        "neither tau ({tau:.3e}) nor kappa ({kappa:.3e}) dominates"
    ));
    Classification {
        status: Status::IllPosed,
        solution: None,
        certificate: None,
        diagnostics,
    }
}

/// `ceil(C sqrt(nu) log(1/eps))` with `C = 1.6 / c_p`. The factor 1.6 bounds
/// `kappa_x / sqrt(nu)` for every `nu >= 1`, so the estimate is at least the
/// fixed-step iteration count.
pub fn iteration_bound_estimate(nu: f64, eps: f64, preset: Preset) -> usize {
    if !(eps > 0.0 && eps < 1.0) || !(nu >= 1.0) {
        return 0;
    }
    let c = 1.6 / preset.predictor_scale();
    (c * nu.sqrt() * (1.0 / eps).ln()).ceil() as usize
}

struct LoopState<'a> {
    g: &'a GMatrix,
    fbar: &'a BarrierOracle,
    params: &'a SolverParams,
    constants: StepConstants,
    alpha_p: f64,
    started: Instant,
    trace: IterationTrace,
}

impl LoopState<'_> {
    fn breach(&self, iteration: usize, phase: &'static str, z: &HsdPoint, prox: f64, bound: f64) -> Error {
        Error::InvariantViolation(Box::new(InvariantBreach {
            iteration,
            phase,
            proximity: prox,
            bound,
            mu: mu(z, self.fbar.nu()),
            xbar: z.xbar.iter().copied().collect(),
            y: z.y.iter().copied().collect(),
            sbar: z.sbar.iter().copied().collect(),
        }))
    }

    fn record(&mut self, iter: usize, phase: StepKind, alpha: f64, z: &HsdPoint, before: f64, after: f64) {
        self.trace.records.push(IterationRecord {
            iter,
            phase,
            alpha,
            mu: mu(z, self.fbar.nu()),
            residual_norm: residual(self.g, z).norm(),
            proximity_before: before,
            proximity_after: after,
            kappa_x: self.constants.kappa_x,
            wall_ms: self.started.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn predictor(&mut self, iter: usize, z: HsdPoint, before: f64) -> Result<(HsdPoint, f64)> {
        let beta = self.params.preset.beta();
        let dz = predictor_direction_with(self.params.kkt, self.g, &z, self.fbar)?;
        let alpha = if self.params.line_search {
            line_search_predictor(&z, &dz, beta, self.fbar, &self.constants, self.alpha_p)
        } else {
            self.alpha_p
        };
        let next = apply_step(&z, &dz, alpha);
        let after = proximity_or_inf(&next, self.fbar);
        self.record(iter, StepKind::Predictor, alpha, &next, before, after);
        if self.params.check_invariants && !(after <= beta && after < 1.0) {
            return Err(self.breach(iter, "predictor", &next, after, beta));
        }
        if !after.is_finite() {
            return Err(Error::InteriorViolation(format!(
                "predictor step left the cone at iteration {iter}"
            )));
        }
        Ok((next, after))
    }

    fn corrector(&mut self, iter: usize, z: HsdPoint, before: f64) -> Result<(HsdPoint, f64)> {
        let alpha = self.params.preset.corrector_alpha();
        let dz = corrector_direction_with(self.params.kkt, self.g, &z, self.fbar)?;
        let next = apply_step(&z, &dz, alpha);
        let after = proximity_or_inf(&next, self.fbar);
        self.record(iter, StepKind::Corrector, alpha, &next, before, after);
        if !after.is_finite() {
            return Err(Error::InteriorViolation(format!(
                "corrector step left the cone at iteration {iter}"
            )));
        }
        Ok((next, after))
    }
}

/// Runs the predictor-corrector method on `p`.
pub fn solve(p: &ConicProblem, params: &SolverParams) -> Result<SolveOutcome> {
    params.validate()?;
    let g = build_g(p)?;
    let fbar = p.homogenized_barrier()?;
    let nubar = fbar.nu();
    let preset = params.preset;
    let eta = preset.eta();
    let constants = step_constants(eta, nubar)?;
    let alpha_p = fixed_predictor_alpha(preset.id(), &constants)?;
    let max_iters = params
        .max_iters
        .unwrap_or_else(|| 10 * iteration_bound_estimate(fbar.nu() - 1.0, params.eps, preset));
    let rc = params.corrector_steps.unwrap_or(preset.corrector_steps());
    let corrector_target = if params.corrector_steps.is_some() {
        preset.beta()
    } else {
        eta
    };

    let mut z = initial_point(p, &fbar)?;
    let start = StartReference {
        mu0: mu(&z, nubar),
        residual0: residual(&g, &z).norm(),
    };
    let mut state = LoopState {
        g: &g,
        fbar: &fbar,
        params,
        constants,
        alpha_p,
        started: Instant::now(),
        trace: IterationTrace::default(),
    };
    let verify_tol = params.verify_tolerance();
    let mut prox = proximity_or_inf(&z, &fbar);
    let mut iterations = 0;

    let classification = loop {
        if check_termination(&g, &z, &start, nubar, params.eps) == Termination::Converged {
            break classify_solution(&z, p, params.tau_kappa_ratio_tol, verify_tol);
        }
        if z.tau() <= params.tau_kappa_ratio_tol * z.kappa() {
            let c = classify_solution(&z, p, params.tau_kappa_ratio_tol, verify_tol);
            if matches!(c.status, Status::PrimalInfeasible | Status::DualInfeasible) {
                break c;
            }
        }
        if iterations >= max_iters {
            break Classification {
                status: Status::IterationLimit,
                solution: None,
                certificate: None,
                diagnostics: vec![format!("stopped after {iterations} iterations")],
            };
        }
        iterations += 1;
        let (next, after) = state.predictor(iterations, z, prox)?;
        z = next;
        prox = after;
        for _ in 0..rc {
            let (next, after) = state.corrector(iterations, z, prox)?;
            z = next;
            prox = after;
        }
        if params.check_invariants && !(prox <= corrector_target) {
            return Err(state.breach(iterations, "corrector", &z, prox, corrector_target));
        }
    };

    Ok(SolveOutcome {
        status: classification.status,
        solution: classification.solution,
        certificate: classification.certificate,
        diagnostics: classification.diagnostics,
        mu: mu(&z, nubar),
        mu0: start.mu0,
        residual_norm: residual(&g, &z).norm(),
        residual_norm0: start.residual0,
        iterations,
        tau: z.tau(),
        kappa: z.kappa(),
        tolerance: verify_tol,
        point: z,
        trace: state.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{ConeSpec, PrimitiveCone};
    use crate::hsd::proximity;
    use nalgebra::DMatrix;

    fn lp(a: &[f64], m: usize, b: &[f64], c: &[f64]) -> ConicProblem {
        let n = c.len();
        ConicProblem::new(
            DMatrix::from_row_slice(m, n, a),
            DVector::from_column_slice(b),
            DVector::from_column_slice(c),
            ConeSpec::new(vec![PrimitiveCone::Nonnegative(n)]),
        )
        .unwrap()
    }

    #[test]
    fn preset_constants() {
        assert_close!(Preset::One.eta(), 0.10, 1e-15);
        assert_close!(Preset::Two.eta(), 0.1225, 1e-15);
        assert!(Preset::from_id(3).is_err());
        assert_eq!(Preset::from_id(2).unwrap(), Preset::Two);
    }

    #[test]
    fn initial_point_is_centered() {
        let p = lp(&[5.0, -3.0], 1, &[12.0], &[2.0, 3.0]);
        let fbar = p.homogenized_barrier().unwrap();
        let z = initial_point(&p, &fbar).unwrap();
        assert_eq!(z.xbar.as_slice(), &[1.0, 1.0, 1.0]);
        assert_eq!(z.sbar.as_slice(), &[1.0, 1.0, 1.0]);
        assert_eq!(mu(&z, 3.0), 1.0);
        assert_eq!(proximity(&z, &fbar).unwrap(), 0.0);

        let p = ConicProblem::new(
            DMatrix::from_row_slice(1, 4, &[1.0, 1.0, 1.0, 0.0]),
            DVector::from_vec(vec![3.0]),
            DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]),
            ConeSpec::new(vec![PrimitiveCone::Exponential, PrimitiveCone::Nonnegative(1)]),
        )
        .unwrap();
        let fbar = p.homogenized_barrier().unwrap();
        let z = initial_point(&p, &fbar).unwrap();
        assert!(proximity(&z, &fbar).unwrap() < 1e-12);
        assert_close!(mu(&z, fbar.nu()), 1.0, 1e-12);
    }

    #[test]
    fn termination_rules() {
        let p = lp(&[5.0, -3.0], 1, &[12.0], &[2.0, 3.0]);
        let g = build_g(&p).unwrap();
        let fbar = p.homogenized_barrier().unwrap();
        let z0 = initial_point(&p, &fbar).unwrap();
        let start = StartReference {
            mu0: mu(&z0, 3.0),
            residual0: residual(&g, &z0).norm(),
        };
        assert_eq!(
            check_termination(&g, &z0, &start, 3.0, 0.5),
            Termination::Continue
        );
        // Scaling the whole point scales both mu (quadratically) and the
        // residual (linearly).
        let eps = 1e-2;
        let z = z0.scaled(eps / 2.0);
        assert_eq!(
            check_termination(&g, &z, &start, 3.0, eps),
            Termination::Converged
        );
        let feasible_start = StartReference {
            mu0: 1.0,
            residual0: 0.0,
        };
        let z = z0.scaled(1e-3);
        assert_eq!(
            check_termination(&g, &z, &feasible_start, 3.0, 1e-4),
            Termination::Converged
        );
    }

    #[test]
    fn tie_between_tau_and_kappa_is_ill_posed() {
        let p = lp(&[5.0, -3.0], 1, &[12.0], &[2.0, 3.0]);
        let z = HsdPoint::new(
            DVector::from_vec(vec![1.0, 1.0, 1e-6]),
            DVector::from_vec(vec![0.0]),
            DVector::from_vec(vec![1.0, 1.0, 1e-6]),
        );
        let c = classify_solution(&z, &p, 1e-6, 1e-4);
        assert_eq!(c.status, Status::IllPosed);
    }

    #[test]
    fn iteration_bound_scaling() {
        assert_eq!(iteration_bound_estimate(2.0, 1.0, Preset::One), 0);
        let a = iteration_bound_estimate(4.0, 1e-6, Preset::One);
        let b = iteration_bound_estimate(16.0, 1e-6, Preset::One);
        assert!(a > 0);
        assert!((b as i64 - 2 * a as i64).abs() <= 1);
    }

    #[test]
    fn zero_iteration_cap() {
        let p = lp(&[5.0, -3.0], 1, &[12.0], &[2.0, 3.0]);
        let params = SolverParams {
            max_iters: Some(0),
            ..SolverParams::default()
        };
        let out = solve(&p, &params).unwrap();
        assert_eq!(out.status, Status::IterationLimit);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn invalid_parameters() {
        let p = lp(&[5.0, -3.0], 1, &[12.0], &[2.0, 3.0]);
        for params in [
            SolverParams {
                eps: 0.0,
                ..SolverParams::default()
            },
            SolverParams {
                eps: 1.5,
                ..SolverParams::default()
            },
            SolverParams {
                corrector_steps: Some(0),
                ..SolverParams::default()
            },
        ] {
            assert!(matches!(solve(&p, &params), Err(Error::Parameter(_))));
        }
    }
}
