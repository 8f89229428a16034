use nalgebra::{DMatrix, DVector};

use super::{BarrierOracle, HessianBlock, INVERSION_MAX_ITERS};
use crate::error::{Error, Result};

/// A dense Hessian block whose squared Cholesky diagonal ratio falls to
/// machine precision is treated as singular.
pub const HESSIAN_RCOND_MIN: f64 = f64::EPSILON;

#[derive(Debug, Clone)]
enum MetricBlock {
    Diagonal { offset: usize, values: Vec<f64> },
    Dense { offset: usize, lower: DMatrix<f64> },
}

/// Hessian metric at an interior point, factored once.
///
/// With `H(x) = L L^T` blockwise, `||u||_x = ||L^T u||` and
/// `||u||*_x = ||L^{-1} u||`.
#[derive(Debug, Clone)]
pub struct LocalMetric {
    center: DVector<f64>,
    blocks: Vec<MetricBlock>,
}

impl LocalMetric {
    pub fn new(barrier: &BarrierOracle, x: &[f64]) -> Result<Self> {
        let raw = barrier.hessian_blocks(x)?;
        let mut blocks = Vec::with_capacity(raw.len());
        for b in raw {
            match b {
                HessianBlock::Diagonal { offset, values } => {
                    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                        return Err(Error::Conditioning { rcond: *bad });
                    }
                    blocks.push(MetricBlock::Diagonal { offset, values });
                }
                HessianBlock::Dense { offset, root, .. } => {
                    if root.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Conditioning { rcond: f64::NAN });
                    }
                    // H = B^T B = R^T R, so L = R^T once the diagonal is made positive.
                    let mut upper = root.qr().r();
                    for i in 0..upper.nrows() {
                        if upper[(i, i)] < 0.0 {
                            upper.row_mut(i).neg_mut();
                        }
                    }
                    let lower = upper.transpose();
                    let d = lower.diagonal();
                    let rcond = (d.min() / d.max()).powi(2);
                    if !(rcond > HESSIAN_RCOND_MIN) {
                        return Err(Error::Conditioning { rcond });
                    }
                    blocks.push(MetricBlock::Dense { offset, lower });
                }
            }
        }
        Ok(Self {
            center: DVector::from_column_slice(x),
            blocks,
        })
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn map_blocks(
        &self,
        u: &DVector<f64>,
        diag: impl Fn(f64, f64) -> f64,
        dense: impl Fn(&MetricBlock, DVector<f64>) -> DVector<f64>,
    ) -> DVector<f64> {
        assert_eq!(u.len(), self.dim(), "vector length does not match metric");
        let mut out = DVector::zeros(u.len());
        for b in &self.blocks {
            match b {
                MetricBlock::Diagonal { offset, values } => {
                    for (i, &v) in values.iter().enumerate() {
                        out[offset + i] = diag(v, u[offset + i]);
                    }
                }
                MetricBlock::Dense { offset, lower } => {
                    let k = lower.nrows();
                    let seg = u.rows(*offset, k).into_owned();
                    out.rows_mut(*offset, k).copy_from(&dense(b, seg));
                }
            }
        }
        out
    }

    /// `H(x) u`
    pub fn apply_hessian(&self, u: &DVector<f64>) -> DVector<f64> {
        self.map_blocks(
            u,
            |h, v| h * v,
            |b, seg| match b {
                MetricBlock::Dense { lower, .. } => lower * lower.tr_mul(&seg),
                _ => unreachable!(),
            },
        )
    }

    /// `H(x)^{-1} u`
    pub fn solve(&self, u: &DVector<f64>) -> DVector<f64> {
        self.map_blocks(
            u,
            |h, v| v / h,
            |b, seg| match b {
                MetricBlock::Dense { lower, .. } => {
                    let w = lower
                        .solve_lower_triangular(&seg)
                        .expect("factor has a positive diagonal");
                    lower
                        .tr_solve_lower_triangular(&w)
                        .expect("factor has a positive diagonal")
                }
                _ => unreachable!(),
            },
        )
    }

    /// `L^T u`, whose Euclidean norm is `||u||_x`.
    pub fn factor_transpose_apply(&self, u: &DVector<f64>) -> DVector<f64> {
        self.map_blocks(
            u,
            |h, v| h.sqrt() * v,
            |b, seg| match b {
                MetricBlock::Dense { lower, .. } => lower.tr_mul(&seg),
                _ => unreachable!(),
            },
        )
    }

    /// `L w`; maps unit Euclidean noise to unit dual-norm noise.
    pub fn factor_apply(&self, w: &DVector<f64>) -> DVector<f64> {
        self.map_blocks(
            w,
            |h, v| h.sqrt() * v,
            |b, seg| match b {
                MetricBlock::Dense { lower, .. } => lower * seg,
                _ => unreachable!(),
            },
        )
    }

    /// `L^{-1} u`, whose Euclidean norm is `||u||*_x`.
    pub fn whiten(&self, u: &DVector<f64>) -> DVector<f64> {
        self.map_blocks(
            u,
            |h, v| v / h.sqrt(),
            |b, seg| match b {
                MetricBlock::Dense { lower, .. } => lower
                    .solve_lower_triangular(&seg)
                    .expect("factor has a positive diagonal"),
                _ => unreachable!(),
            },
        )
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.factor_transpose_apply(u).norm()
    }

    pub fn dual_norm(&self, u: &DVector<f64>) -> f64 {
        self.whiten(u).norm()
    }

    /// `<u1, u2>_{H(x)}`
    pub fn inner(&self, u1: &DVector<f64>, u2: &DVector<f64>) -> f64 {
        u1.dot(&self.apply_hessian(u2))
    }

    /// Dense `H(x)`.
    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        for b in &self.blocks {
            match b {
                MetricBlock::Diagonal { offset, values } => {
                    for (i, &v) in values.iter().enumerate() {
                        h[(offset + i, offset + i)] = v;
                    }
                }
                MetricBlock::Dense { offset, lower } => {
                    let k = lower.nrows();
                    h.view_mut((*offset, *offset), (k, k))
                        .copy_from(&(lower * lower.transpose()));
                }
            }
        }
        h
    }

    /// `L^{-1} M L^{-T}`: the symmetric matrix similar to `H(x)^{-1} M`.
    pub fn congruence(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        assert_eq!(m.shape(), (n, n));
        let mut left = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.whiten(&m.column(j).into_owned());
            left.set_column(j, &col);
        }
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            let row = self.whiten(&left.row(i).transpose());
            out.set_row(i, &row.transpose());
        }
        out
    }
}

/// Newton step `n(x) = -H(x)^{-1} g(x)`; equals `x` for logarithmically
/// homogeneous barriers.
pub fn newton_step(barrier: &BarrierOracle, x: &[f64]) -> Result<DVector<f64>> {
    let metric = barrier.local_metric(x)?;
    let g = barrier.gradient(x)?;
    Ok(-metric.solve(&g))
}

/// Recovers `x` with `-g(x) = s`, i.e. `x = -g*(s)`, by damped Newton
/// minimization of `<x, s> + F(x)` starting from the barrier's anchor.
///
/// Full steps are taken once the Newton decrement is at most 1/4; before
/// that the step is scaled by `1/(1 + decrement)`.
pub fn conjugate_gradient_inverse(barrier: &BarrierOracle, s: &[f64], tol: f64) -> Result<DVector<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if s.len() != barrier.dim() {
        return Err(Error::Configuration(format!(
            "dual point has length {} but barrier dimension is {}",
            s.len(),
            barrier.dim()
        )));
    }
    let s = DVector::from_column_slice(s);
    let mut x = barrier.anchor();
    let mut decrement = f64::INFINITY;
    for _ in 0..INVERSION_MAX_ITERS {
        let g = barrier.gradient(x.as_slice())?;
        let metric = barrier.local_metric(x.as_slice())?;
        let r = &s + g;
        decrement = metric.dual_norm(&r);
        if decrement <= tol {
            return Ok(x);
        }
        let step = if decrement <= 0.25 {
            1.0
        } else {
            1.0 / (1.0 + decrement)
        };
        x -= metric.solve(&r) * step;
        if !barrier.contains(x.as_slice()) {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: INVERSION_MAX_ITERS,
        decrement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{exp_cone_barrier, log_barrier_orthant};

    #[test]
    fn identity_metric_norms() {
        let f = log_barrier_orthant(2).unwrap();
        let m = f.local_metric(&[1.0, 1.0]).unwrap();
        let u = DVector::from_vec(vec![3.0, 4.0]);
        assert_close!(m.norm(&u), 5.0, 1e-15);
        assert_close!(m.dual_norm(&u), 5.0, 1e-15);
    }

    #[test]
    fn scaled_diagonal_metric() {
        let f = log_barrier_orthant(2).unwrap();
        let m = f.local_metric(&[2.0, 1.0]).unwrap();
        assert_close!(m.norm(&DVector::from_vec(vec![2.0, 0.0])), 1.0, 1e-15);
    }

    #[test]
    fn norm_of_center_is_sqrt_nu() {
        let f = BarrierOracle::product(vec![log_barrier_orthant(2).unwrap(), exp_cone_barrier()])
            .unwrap()
            .homogenize();
        let x = [0.5, 3.0, 2.0, 1.5, 0.1, 0.9];
        let m = f.local_metric(&x).unwrap();
        assert_close!(m.norm(m.center()), 6f64.sqrt(), 1e-10);
    }

    #[test]
    fn dual_norm_matches_inverse_image_norm() {
        let f = exp_cone_barrier();
        let m = f.local_metric(&[3.0, 1.0, 0.5]).unwrap();
        let u = DVector::from_vec(vec![0.3, -1.2, 2.0]);
        assert_close!(m.dual_norm(&u), m.norm(&m.solve(&u)), 1e-12);
        let w = DVector::from_vec(vec![1.0, 2.0, -0.5]);
        assert_close!(m.dual_norm(&m.factor_apply(&w)), w.norm(), 1e-12);
    }

    #[test]
    fn newton_step_equals_point() {
        let f = log_barrier_orthant(2).unwrap();
        assert_eq!(newton_step(&f, &[1.0, 1.0]).unwrap().as_slice(), &[1.0, 1.0]);
        let n = newton_step(&f, &[2.0, 5.0]).unwrap();
        assert!((n - DVector::from_vec(vec![2.0, 5.0])).amax() < 1e-14);
        let e = exp_cone_barrier();
        let x = [3.0, 1.0, 0.5];
        let n = newton_step(&e, &x).unwrap();
        assert!((n - DVector::from_column_slice(&x)).amax() < 1e-8);
    }

    #[test]
    fn inversion_on_orthant() {
        let f = log_barrier_orthant(2).unwrap();
        let x = conjugate_gradient_inverse(&f, &[1.0, 1.0], 1e-12).unwrap();
        assert!((x - DVector::from_vec(vec![1.0, 1.0])).amax() < 1e-12);
        let x = conjugate_gradient_inverse(&f, &[2.0, 4.0], 1e-13).unwrap();
        assert!((x - DVector::from_vec(vec![0.5, 0.25])).amax() < 1e-12);
    }

    #[test]
    fn inversion_round_trip_exp_cone() {
        let f = exp_cone_barrier();
        for x0 in [[3.0, 1.0, 0.5], [1.0, 2.0, -4.0], [10.0, 0.1, 0.2]] {
            let s = -f.gradient(&x0).unwrap();
            let x = conjugate_gradient_inverse(&f, s.as_slice(), 1e-12).unwrap();
            assert!((x - DVector::from_column_slice(&x0)).amax() < 1e-6);
        }
    }

    #[test]
    fn inversion_outside_dual_cone_fails() {
        let f = log_barrier_orthant(2).unwrap();
        assert!(conjugate_gradient_inverse(&f, &[1.0, -1.0], 1e-10).is_err());
        assert!(matches!(
            conjugate_gradient_inverse(&f, &[1.0, 1.0], 0.0),
            Err(Error::Parameter(_))
        ));
    }
}
