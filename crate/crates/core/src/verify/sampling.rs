//! Random interior points, local-norm directions, neighborhood points and
//! random conic problems.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::barrier::{BarrierOracle, ConeSpec, LocalMetric, PrimitiveCone};
use crate::error::Result;
use crate::hsd::{ConicProblem, HsdPoint};

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Interior point of the barrier's cone, spread over a few orders of
/// magnitude and, for the exponential cone, over distances to the boundary.
pub fn interior_point<R: Rng + ?Sized>(f: &BarrierOracle, rng: &mut R) -> DVector<f64> {
    let mut out = vec![0.0; f.dim()];
    fill_interior(f, rng, &mut out);
    DVector::from_vec(out)
}

fn fill_interior<R: Rng + ?Sized>(f: &BarrierOracle, rng: &mut R, out: &mut [f64]) {
    match f {
        BarrierOracle::Orthant { .. } => {
            for v in out.iter_mut() {
                *v = rng.random_range(-2.0f64..2.0).exp();
            }
        }
        BarrierOracle::ExpCone => {
            let x2 = rng.random_range(-1.5f64..1.5).exp();
            let t = rng.random_range(-2.0f64..2.0);
            let x3 = x2 * t;
            let gap = rng.random_range(-3.0f64..1.0).exp();
            out[0] = x2 * t.exp() * (1.0 + gap);
            out[1] = x2;
            out[2] = x3;
        }
        BarrierOracle::Product { parts, offsets, .. } => {
            for (p, &o) in parts.iter().zip(offsets) {
                fill_interior(p, rng, &mut out[o..o + p.dim()]);
            }
        }
        BarrierOracle::Homogenized { inner } => {
            let n = inner.dim();
            fill_interior(inner, rng, &mut out[..n]);
            out[n] = rng.random_range(-1.0f64..1.0).exp();
        }
    }
}

/// Random `h` with `||h||_x = 1`: `h = L^{-T} w / ||w||`.
pub fn unit_local_direction<R: Rng + ?Sized>(metric: &LocalMetric, rng: &mut R) -> DVector<f64> {
    let w = gaussian_vector(rng, metric.dim());
    let w = &w / w.norm();
    metric.solve(&metric.factor_apply(&w))
}

/// Random `u` with `||u||*_x = 1`: `u = L w / ||w||`.
pub fn unit_dual_direction<R: Rng + ?Sized>(metric: &LocalMetric, rng: &mut R) -> DVector<f64> {
    let w = gaussian_vector(rng, metric.dim());
    metric.factor_apply(&(&w / w.norm()))
}

/// Point `z` with proximity exactly `target` (up to rounding) and gap `mu`.
///
/// `sbar = -mu gbar(xbar) + target mu delta` where `delta` has unit dual norm
/// and `xbar^T delta = 0`, so `mu(z) = mu` and `psi(z) = target mu delta`.
pub fn point_with_proximity<R: Rng + ?Sized>(
    fbar: &BarrierOracle,
    m: usize,
    target: f64,
    mu: f64,
    rng: &mut R,
) -> Result<HsdPoint> {
    let nubar = fbar.nu();
    loop {
        let xbar = interior_point(fbar, rng);
        let metric = fbar.local_metric(xbar.as_slice())?;
        let gbar = fbar.gradient(xbar.as_slice())?;
        let mut delta = metric.factor_apply(&gaussian_vector(rng, xbar.len()));
        // -gbar is the H-image of xbar, so this removes the xbar component.
        delta -= -&gbar * (xbar.dot(&delta) / nubar);
        let norm = metric.dual_norm(&delta);
        if !(norm > 1e-12) {
            continue;
        }
        let sbar = -&gbar * mu + delta * (target * mu / norm);
        return Ok(HsdPoint::new(xbar, gaussian_vector(rng, m), sbar));
    }
}

/// Point in `N(theta)` with proximity drawn from `[0.5 theta, 0.999 theta]`.
pub fn neighborhood_point<R: Rng + ?Sized>(
    fbar: &BarrierOracle,
    m: usize,
    theta: f64,
    rng: &mut R,
) -> Result<HsdPoint> {
    let target = theta * rng.random_range(0.5..0.999);
    let mu = rng.random_range(-3.0f64..1.0).exp();
    point_with_proximity(fbar, m, target, mu, rng)
}

/// Random cone layout of total dimension `n` mixing orthants and
/// exponential cones.
pub fn random_cones<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ConeSpec {
    let exp_count = rng.random_range(0..=n / 3);
    let mut remaining = n - 3 * exp_count;
    let mut cones = Vec::new();
    let mut exp_left = exp_count;
    while exp_left > 0 || remaining > 0 {
        if exp_left > 0 && (remaining == 0 || rng.random_bool(0.5)) {
            cones.push(PrimitiveCone::Exponential);
            exp_left -= 1;
        } else {
            let k = rng.random_range(1..=remaining);
            cones.push(PrimitiveCone::Nonnegative(k));
            remaining -= k;
        }
    }
    ConeSpec::new(cones)
}

/// Random problem with `n` variables and `m <= n` Gaussian constraints.
/// Whether it is feasible is left to chance; the step identities do not
/// depend on it.
pub fn random_problem<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<ConicProblem> {
    let cones = random_cones(n, rng);
    loop {
        let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let b = gaussian_vector(rng, m);
        let c = gaussian_vector(rng, n);
        match ConicProblem::new(a, b, c, cones.clone()) {
            Ok(p) => return Ok(p),
            Err(crate::Error::Configuration(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{exp_cone_barrier, log_barrier_orthant};
    use crate::hsd::{mu, proximity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_points_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = BarrierOracle::product(vec![log_barrier_orthant(2).unwrap(), exp_cone_barrier()])
            .unwrap()
            .homogenize();
        for _ in 0..200 {
            assert!(f.contains(interior_point(&f, &mut rng).as_slice()));
        }
    }

    #[test]
    fn local_directions_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = exp_cone_barrier();
        for _ in 0..50 {
            let x = interior_point(&f, &mut rng);
            let m = f.local_metric(x.as_slice()).unwrap();
            assert_close!(m.norm(&unit_local_direction(&m, &mut rng)), 1.0, 1e-10);
            assert_close!(m.dual_norm(&unit_dual_direction(&m, &mut rng)), 1.0, 1e-10);
        }
    }

    #[test]
    fn neighborhood_points_hit_their_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = BarrierOracle::product(vec![log_barrier_orthant(1).unwrap(), exp_cone_barrier()])
            .unwrap()
            .homogenize();
        for _ in 0..100 {
            let z = point_with_proximity(&f, 2, 0.2, 0.3, &mut rng).unwrap();
            assert_close!(proximity(&z, &f).unwrap(), 0.2, 1e-9);
            assert_close!(mu(&z, f.nu()), 0.3, 1e-9);
            assert!(f.dual_contains(z.sbar.as_slice()));
        }
    }

    #[test]
    fn random_cones_fill_the_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..30 {
            assert_eq!(random_cones(n, &mut rng).dim(), n);
        }
        let p = random_problem(12, 5, &mut rng).unwrap();
        assert_eq!((p.m(), p.n()), (5, 12));
    }
}
