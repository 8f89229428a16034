//! Closed-form derivatives of the exponential-cone barrier
//! `F(x) = -log(x2 log(x1/x2) - x3) - log x1 - log x2` on
//! `cl{x : x1 >= x2 exp(x3/x2), x1, x2 > 0}`.

use nalgebra::{DMatrix, Vector3};

use super::INTERIOR_MARGIN;

/// The unique point with `-g(x) = x`.
pub const EXP_CONE_ANCHOR: [f64; 3] = [
    1.290_927_709_856_958,
    0.805_102_001_584_795_3,
    -0.827_838_399_065_678_6,
];

fn log_arg(x: &[f64]) -> f64 {
    x[1] * (x[0] / x[1]).ln() - x[2]
}

pub(super) fn contains(x: &[f64]) -> bool {
    x[0] > INTERIOR_MARGIN && x[1] > INTERIOR_MARGIN && log_arg(x) > INTERIOR_MARGIN
}

/// Interior of the dual cone `{s : s1 >= -s3 exp(s2/s3 - 1), s1 > 0, s3 < 0}`.
pub fn exp_dual_interior(s: &[f64]) -> bool {
    s.len() == 3 && s[0] > 0.0 && s[2] < 0.0 && s[0] > -s[2] * (s[1] / s[2] - 1.0).exp()
}

pub(super) fn value(x: &[f64]) -> f64 {
    -log_arg(x).ln() - x[0].ln() - x[1].ln()
}

fn grad_log_arg(x: &[f64]) -> Vector3<f64> {
    Vector3::new(x[1] / x[0], (x[0] / x[1]).ln() - 1.0, -1.0)
}

pub(super) fn gradient(x: &[f64]) -> [f64; 3] {
    let p = log_arg(x);
    let dp = grad_log_arg(x);
    [-dp[0] / p - 1.0 / x[0], -dp[1] / p - 1.0 / x[1], -dp[2] / p]
}

/// `B` with `H(x) = B^T B`: rows `e1/x1`, `e2/x2`, `grad p / p` and
/// `v / sqrt(p)`, where `-hess p = v v^T` with `v = (sqrt(x2)/x1, -1/sqrt(x2), 0)`.
///
/// Near the boundary `p` is tiny and forming `H` loses its small eigenvalues
/// to cancellation; a QR factorization of `B` keeps them.
pub(super) fn hessian_root(x: &[f64]) -> DMatrix<f64> {
    let p = log_arg(x);
    let dp = grad_log_arg(x);
    let sp = p.sqrt();
    let r2 = x[1].sqrt();
    DMatrix::from_row_slice(
        4,
        3,
        &[
            1.0 / x[0],
            0.0,
            0.0,
            0.0,
            1.0 / x[1],
            0.0,
            dp[0] / p,
            dp[1] / p,
            dp[2] / p,
            r2 / x[0] / sp,
            -1.0 / (r2 * sp),
            0.0,
        ],
    )
}

pub(super) fn hessian(x: &[f64]) -> DMatrix<f64> {
    let b = hessian_root(x);
    let h = b.tr_mul(&b);
    (&h + h.transpose()) * 0.5
}
