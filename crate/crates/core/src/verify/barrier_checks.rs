//! Checks of the barrier calculus: derivatives by finite differences, the
//! logarithmic-homogeneity identities, self-concordance and its
//! consequences, damped Newton steps, and conjugacy.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::bounds::damped_newton_bound;
use super::sampling::{gaussian_vector, interior_point, unit_local_direction};
use super::{stream_rng, Accumulator, CheckReport, VerifyConfig};
use crate::barrier::{conjugate_gradient_inverse, exp_cone_barrier, log_barrier_orthant, BarrierOracle};
use crate::error::Result;

/// Finite-difference step along unit local directions.
const FD_STEP: f64 = 1e-5;
/// Tolerance for finite-difference and conjugacy checks.
pub const FD_TOL: f64 = 1e-6;
/// Largest local distance `||u - x||_x` sampled inside the Dikin ball.
const DIKIN_RADIUS: f64 = 0.9;
const INVERSION_TOL: f64 = 1e-12;
const CONJUGATE_FD_STEP: f64 = 1e-4;

/// Damping factors for the damped Newton check.
pub const NEWTON_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Barriers the sweeps run on: an orthant, the exponential cone and a
/// homogenized product of both.
pub fn verification_barriers() -> Vec<(String, BarrierOracle)> {
    let mixed = BarrierOracle::product(vec![
        log_barrier_orthant(2).expect("positive dimension"),
        exp_cone_barrier(),
    ])
    .expect("two parts")
    .homogenize();
    vec![
        (
            "orthant3".into(),
            log_barrier_orthant(3).expect("positive dimension"),
        ),
        ("exp".into(), exp_cone_barrier()),
        ("hsd-orthant2-exp".into(), mixed),
    ]
}

fn offset(x: &DVector<f64>, h: &DVector<f64>, t: f64) -> DVector<f64> {
    x + h * t
}

/// `(||u - x||_x, ||v||_u / ||v||_x)`.
pub fn self_concordance_ratio(
    f: &BarrierOracle,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(f64, f64)> {
    let mx = f.local_metric(x.as_slice())?;
    let mu = f.local_metric(u.as_slice())?;
    Ok((mx.norm(&(u - x)), mu.norm(v) / mx.norm(v)))
}

/// `(||u - x||_x, ||v||*_u / ||v||*_x)`.
pub fn dual_norm_ratio(
    f: &BarrierOracle,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(f64, f64)> {
    let mx = f.local_metric(x.as_slice())?;
    let mu = f.local_metric(u.as_slice())?;
    Ok((mx.norm(&(u - x)), mu.dual_norm(v) / mx.dual_norm(v)))
}

/// `(||u - x||_x, ||g(u) - g(x)||*_x)`.
pub fn gradient_change(f: &BarrierOracle, x: &DVector<f64>, u: &DVector<f64>) -> Result<(f64, f64)> {
    let mx = f.local_metric(x.as_slice())?;
    let d = f.gradient(u.as_slice())? - f.gradient(x.as_slice())?;
    Ok((mx.norm(&(u - x)), mx.dual_norm(&d)))
}

/// Operator norms in the `x`-metric:
/// `||H(x)^{-1}H(u)||`, `||H(u)^{-1}H(x)||`, `||I - H(x)^{-1}H(u)||`,
/// `||I - H(u)^{-1}H(x)||`, all from the eigenvalues of
/// `L^{-1} H(u) L^{-T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorms {
    pub distance: f64,
    pub forward: f64,
    pub backward: f64,
    pub forward_deviation: f64,
    pub backward_deviation: f64,
}

pub fn hessian_operator_norms(
    f: &BarrierOracle,
    x: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<OperatorNorms> {
    let mx = f.local_metric(x.as_slice())?;
    let hu = f.local_metric(u.as_slice())?.hessian();
    let eig = mx.congruence(&hu).symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    Ok(OperatorNorms {
        distance: mx.norm(&(u - x)),
        forward: hi,
        backward: 1.0 / lo,
        forward_deviation: eig.iter().map(|l| (1.0 - l).abs()).fold(0.0, f64::max),
        backward_deviation: eig.iter().map(|l| (1.0 - 1.0 / l).abs()).fold(0.0, f64::max),
    })
}

/// Newton step of `f(v) = <c, v> + F(v)` at `x`.
pub fn linear_newton_step(f: &BarrierOracle, c: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let m = f.local_metric(x.as_slice())?;
    Ok(-m.solve(&(c + f.gradient(x.as_slice())?)))
}

/// `(||n(x)||_x, ||n(x+)||_{x+})` for `x+ = x + alpha n(x)` and
/// `f(v) = <c, v> + F(v)`.
pub fn damped_newton_norms(
    f: &BarrierOracle,
    c: &DVector<f64>,
    x: &DVector<f64>,
    alpha: f64,
) -> Result<(f64, f64)> {
    let n = linear_newton_step(f, c, x)?;
    let before = f.local_metric(x.as_slice())?.norm(&n);
    let xp = x + &n * alpha;
    let np = linear_newton_step(f, c, &xp)?;
    let after = f.local_metric(xp.as_slice())?.norm(&np);
    Ok((before, after))
}

/// Samples `u = x + r h` with `||h||_x = 1` and `r` uniform in `[0, 0.9)`.
fn dikin_pair(f: &BarrierOracle, rng: &mut ChaCha8Rng) -> Result<(DVector<f64>, DVector<f64>)> {
    let x = interior_point(f, rng);
    let m = f.local_metric(x.as_slice())?;
    let h = unit_local_direction(&m, rng);
    let r = rng.random_range(0.0..DIKIN_RADIUS);
    let u = offset(&x, &h, r);
    Ok((x, u))
}

/// Central differences of `F` and `g` along unit local directions against
/// `g` and `H`.
pub fn check_finite_differences(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut grad = Accumulator::new("fd.gradient", label);
    let mut hess = Accumulator::new("fd.hessian", label);
    for _ in 0..samples {
        let res: Result<(f64, f64)> = (|| {
            let x = interior_point(f, rng);
            let m = f.local_metric(x.as_slice())?;
            let h = unit_local_direction(&m, rng);
            let (xp, xm) = (offset(&x, &h, FD_STEP), offset(&x, &h, -FD_STEP));
            let dval = (f.value(xp.as_slice())? - f.value(xm.as_slice())?) / (2.0 * FD_STEP);
            let g = f.gradient(x.as_slice())?;
            let dgrad = (f.gradient(xp.as_slice())? - f.gradient(xm.as_slice())?) / (2.0 * FD_STEP);
            Ok((
                (dval - g.dot(&h)).abs(),
                m.dual_norm(&(dgrad - m.apply_hessian(&h))),
            ))
        })();
        match res {
            Ok((eg, eh)) => {
                grad.observe_with(eg, FD_TOL, 0.0);
                hess.observe_with(eh, FD_TOL, 0.0);
            }
            Err(_) => {
                grad.observe_error();
                hess.observe_error();
            }
        }
    }
    vec![grad.finish(), hess.finish()]
}

/// `H(x) x = -g(x)`, `||g(x)||*_x = sqrt(nu)`, `F(tx) = F(x) - nu log t`, and
/// positive definiteness of the dense Hessian.
pub fn check_log_homogeneity(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let nu = f.nu();
    let mut hx = Accumulator::new("homogeneity.hessian_point", label);
    let mut gnorm = Accumulator::new("homogeneity.gradient_norm", label);
    let mut scaling = Accumulator::new("homogeneity.scaling", label);
    let mut pd = Accumulator::new("hessian.positive_definite", label);
    for _ in 0..samples {
        let x = interior_point(f, rng);
        let t = rng.random_range(-2.0f64..2.0).exp();
        let res: Result<_> = (|| {
            let m = f.local_metric(x.as_slice())?;
            let g = f.gradient(x.as_slice())?;
            let e1 = m.dual_norm(&(m.apply_hessian(&x) + &g));
            let e2 = (m.dual_norm(&g) - nu.sqrt()).abs();
            let fx = f.value(x.as_slice())?;
            let e3 = (f.value((&x * t).as_slice())? - fx + nu * t.ln()).abs();
            let definite = f.hessian(x.as_slice())?.cholesky().is_some();
            Ok((e1, e2, e3, fx, definite))
        })();
        match res {
            Ok((e1, e2, e3, fx, definite)) => {
                hx.observe_with(e1, 0.0, 1e-9 * nu.sqrt());
                gnorm.observe_with(e2, 0.0, 1e-9 * nu.sqrt());
                scaling.observe_with(e3, 0.0, 1e-9 * fx.abs().max(1.0));
                pd.observe_with(if definite { 0.0 } else { 1.0 }, 0.0, 0.0);
            }
            Err(_) => {
                for acc in [&mut hx, &mut gnorm, &mut scaling, &mut pd] {
                    acc.observe_error();
                }
            }
        }
    }
    vec![hx.finish(), gnorm.finish(), scaling.finish(), pd.finish()]
}

/// `1 - r <= ||v||_u / ||v||_x <= 1 / (1 - r)` with `r = ||u - x||_x < 1`.
pub fn check_self_concordance_ratio(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut lower = Accumulator::new("selfconcordance.lower", label);
    let mut upper = Accumulator::new("selfconcordance.upper", label);
    for _ in 0..samples {
        let res = dikin_pair(f, rng).and_then(|(x, u)| {
            let v = gaussian_vector(rng, x.len());
            self_concordance_ratio(f, &x, &u, &v)
        });
        match res {
            Ok((r, ratio)) => {
                lower.observe(1.0 - r, ratio);
                upper.observe(ratio, 1.0 / (1.0 - r));
            }
            Err(_) => {
                lower.observe_error();
                upper.observe_error();
            }
        }
    }
    vec![lower.finish(), upper.finish()]
}

/// The four operator-norm bounds equivalent to self-concordance.
pub fn check_hessian_operator_bounds(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut accs = [
        Accumulator::new("operator.forward", label),
        Accumulator::new("operator.backward", label),
        Accumulator::new("operator.forward_deviation", label),
        Accumulator::new("operator.backward_deviation", label),
    ];
    for _ in 0..samples {
        match dikin_pair(f, rng).and_then(|(x, u)| hessian_operator_norms(f, &x, &u)) {
            Ok(o) => {
                let bound = (1.0 - o.distance).powi(-2);
                accs[0].observe(o.forward, bound);
                accs[1].observe(o.backward, bound);
                accs[2].observe(o.forward_deviation, bound - 1.0);
                accs[3].observe(o.backward_deviation, bound - 1.0);
            }
            Err(_) => accs.iter_mut().for_each(Accumulator::observe_error),
        }
    }
    accs.into_iter().map(Accumulator::finish).collect()
}

/// Damped Newton bound on `f(v) = <c, v> + F(v)` with `c = -g(x*)` for a
/// minimizer `x*` within local distance 0.6 of the start.
pub fn check_damped_newton(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut acc = Accumulator::new("damped_newton", label);
    for _ in 0..samples {
        let res: Result<Vec<(f64, f64, f64)>> = (|| {
            let x = interior_point(f, rng);
            let m = f.local_metric(x.as_slice())?;
            let h = unit_local_direction(&m, rng);
            let star = offset(&x, &h, rng.random_range(0.05..0.6));
            let c = -f.gradient(star.as_slice())?;
            let mut out = Vec::new();
            let n0 = m.norm(&linear_newton_step(f, &c, &x)?);
            for &alpha in NEWTON_ALPHAS.iter().filter(|&&a| a * n0 < 1.0) {
                let (n0, n1) = damped_newton_norms(f, &c, &x, alpha)?;
                out.push((alpha, n0, n1));
            }
            Ok(out)
        })();
        match res {
            Ok(rows) => {
                for (alpha, n0, n1) in rows {
                    acc.observe(n1, damped_newton_bound(alpha, n0));
                }
            }
            Err(_) => acc.observe_error(),
        }
    }
    vec![acc.finish()]
}

/// `||v||*_u / ||v||*_x <= 1 / (1 - ||u - x||_x)`.
pub fn check_dual_norm_change(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut acc = Accumulator::new("dual_norm_change", label);
    for _ in 0..samples {
        let res = dikin_pair(f, rng).and_then(|(x, u)| {
            let v = gaussian_vector(rng, x.len());
            dual_norm_ratio(f, &x, &u, &v)
        });
        match res {
            Ok((r, ratio)) => acc.observe(ratio, 1.0 / (1.0 - r)),
            Err(_) => acc.observe_error(),
        }
    }
    vec![acc.finish()]
}

/// `||g(u) - g(x)||*_x <= r / (1 - r)`.
pub fn check_gradient_bound(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let mut acc = Accumulator::new("gradient_bound", label);
    for _ in 0..samples {
        match dikin_pair(f, rng).and_then(|(x, u)| gradient_change(f, &x, &u)) {
            Ok((r, lhs)) => acc.observe(lhs, r / (1.0 - r)),
            Err(_) => acc.observe_error(),
        }
    }
    vec![acc.finish()]
}

/// Conjugacy through the numerical inverse `s -> x(s)` of `-g`:
/// the round trip `x(-g(x0)) = x0`, `H*(s) = H(x0)^{-1}` through dual norms,
/// and `F*` having parameter `nu`.
///
/// `H*(s) = -dx/ds` is estimated by central differences of the inverse along
/// the columns of the Cholesky factor `L` of `H(x0)`, giving
/// `M ~ L^T H*(s) L` (the identity if the conjugate Hessian is `H(x0)^{-1}`).
pub fn check_conjugacy(
    f: &BarrierOracle,
    label: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckReport> {
    let nu = f.nu();
    let mut round = Accumulator::new("conjugacy.round_trip", label);
    let mut dual = Accumulator::new("conjugacy.dual_norm", label);
    let mut param = Accumulator::new("conjugacy.barrier_parameter", label);
    for _ in 0..samples {
        let res: Result<(f64, f64, f64)> = (|| {
            let x0 = interior_point(f, rng);
            let m0 = f.local_metric(x0.as_slice())?;
            let s = -f.gradient(x0.as_slice())?;
            let x = conjugate_gradient_inverse(f, s.as_slice(), INVERSION_TOL)?;
            let e_round = m0.norm(&(&x - &x0));

            let k = x0.len();
            let mut fd = DMatrix::zeros(k, k);
            for j in 0..k {
                let mut e = DVector::zeros(k);
                e[j] = 1.0;
                let u = m0.factor_apply(&e);
                let xp =
                    conjugate_gradient_inverse(f, (&s + &u * CONJUGATE_FD_STEP).as_slice(), INVERSION_TOL)?;
                let xm =
                    conjugate_gradient_inverse(f, (&s - &u * CONJUGATE_FD_STEP).as_slice(), INVERSION_TOL)?;
                let col = -(xp - xm) / (2.0 * CONJUGATE_FD_STEP);
                fd.set_column(j, &m0.factor_transpose_apply(&col));
            }
            let fd = (&fd + fd.transpose()) * 0.5;

            let w = gaussian_vector(rng, k);
            let w = &w / w.norm();
            // ||L w||*_{x0} = 1 by construction.
            let e_dual = (w.dot(&(&fd * &w)).sqrt() - 1.0).abs();

            // ||g*(s)||_{F*-dual} = sqrt(x^T H*(s)^{-1} x) = sqrt(y^T M^{-1} y), y = L^T x.
            let y = m0.factor_transpose_apply(&x);
            let z = fd
                .lu()
                .solve(&y)
                .ok_or(crate::Error::Conditioning { rcond: 0.0 })?;
            let e_param = (y.dot(&z).sqrt() - nu.sqrt()).abs();
            Ok((e_round, e_dual, e_param))
        })();
        match res {
            Ok((a, b, c)) => {
                round.observe_with(a, FD_TOL, 0.0);
                dual.observe_with(b, FD_TOL, 0.0);
                param.observe_with(c, FD_TOL * nu.sqrt(), 0.0);
            }
            Err(_) => {
                round.observe_error();
                dual.observe_error();
                param.observe_error();
            }
        }
    }
    vec![round.finish(), dual.finish(), param.finish()]
}

type BarrierCheck = fn(&BarrierOracle, &str, usize, &mut ChaCha8Rng) -> Vec<CheckReport>;

const BARRIER_CHECKS: [BarrierCheck; 8] = [
    check_finite_differences,
    check_log_homogeneity,
    check_self_concordance_ratio,
    check_hessian_operator_bounds,
    check_damped_newton,
    check_dual_norm_change,
    check_gradient_bound,
    check_conjugacy,
];

/// Every barrier check on every verification barrier.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (bi, (label, f)) in verification_barriers().iter().enumerate() {
        for (ci, check) in BARRIER_CHECKS.iter().enumerate() {
            let mut rng = stream_rng(cfg.seed, (100 + 10 * bi + ci) as u64);
            out.extend(check(f, label, cfg.samples, &mut rng));
        }
    }
    Ok(out)
}
