//! Checks of the predictor and corrector step analysis on random problems
//! and random points of the central-path neighborhoods.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::bounds::{
    corrector_mu_ratio_lower, corrector_proximity_bound, predictor_mu_change_bound,
    predictor_mu_ratio_bounds, predictor_proximity_bound,
};
use super::sampling::{neighborhood_point, random_problem};
use super::{stream_rng, Accumulator, CheckReport, VerifyConfig};
use crate::barrier::BarrierOracle;
use crate::error::Result;
use crate::hsd::{build_g, mu, proximity, psi, residual, GMatrix};
use crate::solver::{initial_point, Preset};
use crate::step::{
    apply_step, corrector_direction, fixed_predictor_alpha, predictor_direction, step_constants,
};

/// Corrector neighborhoods swept by [`check_corrector_bounds`].
pub const CORRECTOR_THETAS: [f64; 3] = [0.20, 0.25, 0.30];
/// Corrector step sizes swept by [`check_corrector_bounds`].
pub const CORRECTOR_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Predictor steps are `k / 8 * 0.999 / kappa_x` for `k = 0..=8`.
const PREDICTOR_GRID: usize = 8;

const IDENTITY_RELATIVE_TOL: f64 = 1e-10;
const RESIDUAL_SCALED_TOL: f64 = 1e-12;
const IDENTITY_MAX_N: usize = 50;
const IDENTITY_MAX_M: usize = 25;
const IDENTITY_CYCLES: usize = 3;

fn bool_gap(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// Small random problem with its `G` and homogenized barrier.
fn sample_problem(rng: &mut ChaCha8Rng, max_n: usize) -> Result<(GMatrix, BarrierOracle)> {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(0..=n.min(IDENTITY_MAX_M));
    let p = random_problem(n, m, rng)?;
    Ok((build_g(&p)?, p.homogenized_barrier()?))
}

/// Predictor bounds for `z in N(eta)` at every step on the grid in
/// `[0, kappa_x^{-1})`: direction norms, the gap identity, the gap change and
/// ratio, primal interiority, the proximity bound and dual interiority.
pub fn check_predictor_bounds(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for preset in [Preset::One, Preset::Two] {
        let label = format!("preset{}", preset.id());
        let eta = preset.eta();
        let mut accs: Vec<Accumulator> = [
            "predictor.direction_primal",
            "predictor.direction_dual",
            "predictor.mu_identity",
            "predictor.mu_change",
            "predictor.mu_ratio_lower",
            "predictor.mu_ratio_upper",
            "predictor.primal_interior",
            "predictor.proximity",
            "predictor.dual_interior",
        ]
        .iter()
        .map(|id| Accumulator::new(*id, label.clone()))
        .collect();
        let mut rng = stream_rng(cfg.seed, 200 + preset.id() as u64);
        for _ in 0..cfg.samples {
            let res: Result<()> = (|| {
                let (g, fbar) = sample_problem(&mut rng, 10)?;
                let nubar = fbar.nu();
                let k = step_constants(eta, nubar)?;
                let z = neighborhood_point(&fbar, g.m(), eta, &mut rng)?;
                let m0 = mu(&z, nubar);
                let metric = fbar.local_metric(z.xbar.as_slice())?;
                let dz = predictor_direction(&g, &z, &fbar)?;
                accs[0].observe(metric.norm(&dz.dxbar), k.kappa_x);
                accs[1].observe(metric.dual_norm(&dz.dsbar), k.kappa_s * m0);
                let psi0 = psi(&z.xbar, &z.sbar, m0, &fbar)?;
                let psi_dx = psi0.dot(&dz.dxbar);
                for j in 0..=PREDICTOR_GRID {
                    let alpha = j as f64 / PREDICTOR_GRID as f64 * 0.999 / k.kappa_x;
                    let zp = apply_step(&z, &dz, alpha);
                    let mp = mu(&zp, nubar);
                    let predicted = (1.0 - alpha) * (m0 + alpha * psi_dx / nubar);
                    accs[2].observe_with((mp - predicted).abs(), 0.0, IDENTITY_RELATIVE_TOL * m0);
                    accs[3].observe(
                        (mp - m0).abs() / m0,
                        predictor_mu_change_bound(alpha, eta, k.kappa_x, nubar),
                    );
                    let (lo, hi) = predictor_mu_ratio_bounds(alpha, eta, k.kappa_x, nubar);
                    accs[4].observe(lo, mp / m0);
                    accs[5].observe(mp / m0, hi);
                    let interior = fbar.contains(zp.xbar.as_slice());
                    accs[6].observe_with(bool_gap(interior), 0.0, 0.0);
                    if !interior {
                        continue;
                    }
                    let prox = proximity(&zp, &fbar)?;
                    accs[7].observe(prox, predictor_proximity_bound(alpha * k.kappa_x, eta));
                    if prox < 1.0 {
                        accs[8].observe_with(bool_gap(fbar.dual_contains(zp.sbar.as_slice())), 0.0, 0.0);
                    }
                }
                Ok(())
            })();
            if res.is_err() {
                accs.iter_mut().for_each(Accumulator::observe_error);
            }
        }
        out.extend(accs.into_iter().map(Accumulator::finish));
    }
    Ok(out)
}

/// Corrector bounds for `z in N(theta)`: direction norms, the convex
/// combination `psi + alpha ds`, orthogonality, the unchanged residual, the
/// gap identity and ratio, interiority, and the proximity bound.
pub fn check_corrector_bounds(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (ti, &theta) in CORRECTOR_THETAS.iter().enumerate() {
        let label = format!("theta={theta}");
        let mut accs: Vec<Accumulator> = [
            "corrector.direction_primal",
            "corrector.direction_dual",
            "corrector.psi_step",
            "corrector.orthogonality",
            "corrector.residual",
            "corrector.mu_identity",
            "corrector.mu_change",
            "corrector.mu_ratio_lower",
            "corrector.mu_ratio_upper",
            "corrector.interior",
            "corrector.proximity",
        ]
        .iter()
        .map(|id| Accumulator::new(*id, label.clone()))
        .collect();
        let mut rng = stream_rng(cfg.seed, 300 + ti as u64);
        for _ in 0..cfg.samples {
            let res: Result<()> = (|| {
                let (g, fbar) = sample_problem(&mut rng, 10)?;
                let nubar = fbar.nu();
                let z = neighborhood_point(&fbar, g.m(), theta, &mut rng)?;
                let m0 = mu(&z, nubar);
                let r0 = residual(&g, &z);
                let metric = fbar.local_metric(z.xbar.as_slice())?;
                let dz = corrector_direction(&g, &z, &fbar)?;
                let dx_norm = metric.norm(&dz.dxbar);
                let ds_norm = metric.dual_norm(&dz.dsbar);
                accs[0].observe(dx_norm, theta);
                accs[1].observe(ds_norm, theta * m0);
                accs[3].observe_with(
                    dz.dxbar.dot(&dz.dsbar).abs(),
                    0.0,
                    IDENTITY_RELATIVE_TOL * (dx_norm * ds_norm).max(f64::MIN_POSITIVE),
                );
                let psi0 = psi(&z.xbar, &z.sbar, m0, &fbar)?;
                for &alpha in &CORRECTOR_ALPHAS {
                    accs[2].observe(metric.dual_norm(&(&psi0 + &dz.dsbar * alpha)), theta * m0);
                    let zp = apply_step(&z, &dz, alpha);
                    let dr = (residual(&g, &zp) - &r0).norm();
                    accs[4].observe_with(dr, 0.0, RESIDUAL_SCALED_TOL * r0.norm().max(1.0));
                    let mp = mu(&zp, nubar);
                    let predicted = m0 * (1.0 - alpha * dx_norm * dx_norm / nubar);
                    accs[5].observe_with((mp - predicted).abs(), 0.0, IDENTITY_RELATIVE_TOL * m0);
                    accs[6].observe((mp - m0).abs(), alpha * theta * theta * m0 / nubar);
                    accs[7].observe(corrector_mu_ratio_lower(alpha, theta, nubar), mp / m0);
                    accs[8].observe(mp / m0, 1.0);
                    let interior =
                        fbar.contains(zp.xbar.as_slice()) && fbar.dual_contains(zp.sbar.as_slice());
                    accs[9].observe_with(bool_gap(interior), 0.0, 0.0);
                    if interior {
                        accs[10].observe(proximity(&zp, &fbar)?, corrector_proximity_bound(theta, alpha));
                    }
                }
                Ok(())
            })();
            if res.is_err() {
                accs.iter_mut().for_each(Accumulator::observe_error);
            }
        }
        out.extend(accs.into_iter().map(Accumulator::finish));
    }
    Ok(out)
}

fn exact_report(id: &str, instance: &str, lhs: f64, rhs: f64) -> CheckReport {
    let mut acc = Accumulator::new(id, instance);
    acc.observe_with(lhs, rhs, 0.0);
    acc.finish()
}

/// The predictor proximity bound at each preset's `(c_p, eta)` is at most
/// `beta`, with no slack.
pub fn certify_predictor_presets() -> Vec<CheckReport> {
    [Preset::One, Preset::Two]
        .iter()
        .map(|p| {
            exact_report(
                "predictor.preset_bound",
                &format!("c_p={},eta={}", p.predictor_scale(), p.eta()),
                predictor_proximity_bound(p.predictor_scale(), p.eta()),
                p.beta(),
            )
        })
        .collect()
}

/// The corrector proximity bound at `(beta, alpha_c)` is at most
/// `epsilon beta` for each preset, with no slack.
pub fn certify_corrector_presets() -> Vec<CheckReport> {
    [Preset::One, Preset::Two]
        .iter()
        .map(|p| {
            exact_report(
                "corrector.preset_bound",
                &format!("theta={},alpha_c={}", p.beta(), p.corrector_alpha()),
                corrector_proximity_bound(p.beta(), p.corrector_alpha()),
                p.contraction() * p.beta(),
            )
        })
        .collect()
}

/// One fixed predictor step from `z in N(eta)` lands in `N(beta)`, and the
/// preset's corrector steps bring it back to `N(eta)`.
pub fn check_phase_invariants(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for preset in [Preset::One, Preset::Two] {
        let label = format!("preset{}", preset.id());
        let mut pred = Accumulator::new("phase.predictor", label.clone());
        let mut corr = Accumulator::new("phase.corrector", label.clone());
        let mut rng = stream_rng(cfg.seed, 400 + preset.id() as u64);
        for _ in 0..cfg.samples {
            let res: Result<(f64, f64)> = (|| {
                let (g, fbar) = sample_problem(&mut rng, 10)?;
                let k = step_constants(preset.eta(), fbar.nu())?;
                let z = neighborhood_point(&fbar, g.m(), preset.eta(), &mut rng)?;
                let alpha = fixed_predictor_alpha(preset.id(), &k)?;
                let mut z = apply_step(&z, &predictor_direction(&g, &z, &fbar)?, alpha);
                let after_predictor = proximity(&z, &fbar)?;
                for _ in 0..preset.corrector_steps() {
                    z = apply_step(&z, &corrector_direction(&g, &z, &fbar)?, preset.corrector_alpha());
                }
                Ok((after_predictor, proximity(&z, &fbar)?))
            })();
            match res {
                Ok((p1, p2)) => {
                    pred.observe_with(p1, preset.beta(), 0.0);
                    corr.observe_with(p2, preset.eta(), 0.0);
                }
                Err(_) => {
                    pred.observe_error();
                    corr.observe_error();
                }
            }
        }
        out.push(pred.finish());
        out.push(corr.finish());
    }
    Ok(out)
}

/// Exact identities along solver iterations from the canonical start on
/// `instances` random problems with `n <= 50`, `m <= 25` and mixed cones:
/// the predictor scales the residual by `1 - alpha`, the corrector leaves it
/// unchanged and moves the gap by `-alpha mu ||dx||^2 / nubar`, and corrector
/// directions are orthogonal.
pub fn check_step_identities(instances: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let label = format!("instances={instances}");
    let mut ratio = Accumulator::new("identity.predictor.residual_ratio", label.clone());
    let mut unchanged = Accumulator::new("identity.corrector.residual", label.clone());
    let mut gap = Accumulator::new("identity.corrector.mu", label.clone());
    let mut orth = Accumulator::new("identity.corrector.orthogonality", label.clone());
    let preset = Preset::One;
    let mut rng = stream_rng(seed, 500);
    for _ in 0..instances {
        let res: Result<()> = (|| {
            let n = rng.random_range(1..=IDENTITY_MAX_N);
            let m = rng.random_range(1..=n.min(IDENTITY_MAX_M));
            let p = random_problem(n, m, &mut rng)?;
            let g = build_g(&p)?;
            let fbar = p.homogenized_barrier()?;
            let nubar = fbar.nu();
            let k = step_constants(preset.eta(), nubar)?;
            let alpha_p = fixed_predictor_alpha(preset.id(), &k)?;
            let mut z = initial_point(&p, &fbar)?;
            for _ in 0..IDENTITY_CYCLES {
                let r0 = residual(&g, &z);
                let dz = predictor_direction(&g, &z, &fbar)?;
                z = apply_step(&z, &dz, alpha_p);
                let r1 = residual(&g, &z);
                let expected = 1.0 - alpha_p;
                ratio.observe_with(
                    (r1.norm() / r0.norm() - expected).abs(),
                    0.0,
                    IDENTITY_RELATIVE_TOL * expected,
                );
                for _ in 0..preset.corrector_steps() {
                    let r0 = residual(&g, &z);
                    let m0 = mu(&z, nubar);
                    let metric = fbar.local_metric(z.xbar.as_slice())?;
                    let dz = corrector_direction(&g, &z, &fbar)?;
                    let dx_norm = metric.norm(&dz.dxbar);
                    let ds_norm = metric.dual_norm(&dz.dsbar);
                    orth.observe_with(
                        dz.dxbar.dot(&dz.dsbar).abs(),
                        0.0,
                        IDENTITY_RELATIVE_TOL * (dx_norm * ds_norm).max(f64::MIN_POSITIVE),
                    );
                    let alpha = preset.corrector_alpha();
                    z = apply_step(&z, &dz, alpha);
                    unchanged.observe_with(
                        (residual(&g, &z) - &r0).norm(),
                        0.0,
                        RESIDUAL_SCALED_TOL * r0.norm().max(1.0),
                    );
                    let predicted = m0 * (1.0 - alpha * dx_norm * dx_norm / nubar);
                    gap.observe_with((mu(&z, nubar) - predicted).abs(), 0.0, IDENTITY_RELATIVE_TOL * m0);
                }
            }
            Ok(())
        })();
        if res.is_err() {
            for acc in [&mut ratio, &mut unchanged, &mut gap, &mut orth] {
                acc.observe_error();
            }
        }
    }
    Ok(vec![
        ratio.finish(),
        unchanged.finish(),
        gap.finish(),
        orth.finish(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_bounds_hold_without_slack() {
        for r in certify_predictor_presets()
            .into_iter()
            .chain(certify_corrector_presets())
        {
            assert!(r.pass, "{}", r.record());
            assert_eq!(r.slack, 0.0);
        }
    }

    #[test]
    fn small_sweeps_pass() {
        let cfg = VerifyConfig { samples: 30, seed: 5 };
        let all = check_predictor_bounds(&cfg)
            .unwrap()
            .into_iter()
            .chain(check_corrector_bounds(&cfg).unwrap())
            .chain(check_phase_invariants(&cfg).unwrap())
            .chain(check_step_identities(5, 5).unwrap());
        for r in all {
            assert!(r.pass, "{}", r.record());
        }
    }
}
