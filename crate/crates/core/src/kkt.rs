//! Solvers for the Newton systems shared by the predictor and corrector:
//!
//! ```text
//! G (dy; dxbar) - (0; dsbar) = r1
//!        dsbar + mu H dxbar  = r2
//! ```
//!
//! Two independent routes are provided. `Reduced` eliminates `dsbar` and `dx`
//! through the block-diagonal Hessian and factors an `(m+1)`-square system in
//! `(dy, dtau)`. `Full` assembles the whole `(m+2n+2)`-square system and
//! factors it densely. Both finish with one step of iterative refinement
//! against the full system.
//!
//! The reduced matrix is a normal-equations form whose condition number grows
//! like `mu^{-2}` near a solution even when the full system is benign, so its
//! own condition estimate is not used to reject it. Instead the refined
//! solution must have a small backward error in the full system; otherwise the
//! full system is factored and the strict threshold applies there.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::barrier::LocalMetric;
use crate::error::{Error, Result};
use crate::hsd::GMatrix;

/// Reciprocal condition estimate below which a factorization is rejected.
pub(crate) const RCOND_THRESHOLD: f64 = 1e-14;

/// Normwise backward error a reduced solve must reach to be accepted.
const REDUCED_BACKWARD_ERROR: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KktMethod {
    #[default]
    Reduced,
    Full,
}

pub(crate) struct NewtonSolution {
    pub dy: DVector<f64>,
    pub dxbar: DVector<f64>,
    pub dsbar: DVector<f64>,
}

/// Equilibrated LU: solves `M v = r` through `(D_r M D_c) w = D_r r`,
/// `v = D_c w`.
struct ScaledLu {
    lu: LU<f64, Dyn, Dyn>,
    row_scale: DVector<f64>,
    col_scale: DVector<f64>,
}

impl ScaledLu {
    fn new(
        mut m: DMatrix<f64>,
        row_scale: DVector<f64>,
        col_scale: DVector<f64>,
        threshold: f64,
    ) -> Result<Self> {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= row_scale[i] * col_scale[j];
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Conditioning { rcond: f64::NAN });
        }
        let lu = m.lu();
        let d = lu.u().diagonal().abs();
        let rcond = if d.is_empty() { 1.0 } else { d.min() / d.max() };
        if !(rcond > threshold) {
            return Err(Error::Conditioning { rcond });
        }
        Ok(Self {
            lu,
            row_scale,
            col_scale,
        })
    }

    fn solve(&self, r: &DVector<f64>) -> Result<DVector<f64>> {
        let scaled = r.component_mul(&self.row_scale);
        let w = self.lu.solve(&scaled).ok_or(Error::Conditioning { rcond: 0.0 })?;
        Ok(w.component_mul(&self.col_scale))
    }
}

trait Factor {
    fn solve_once(&self, r1: &DVector<f64>, r2: &DVector<f64>) -> Result<NewtonSolution>;
}

/// Residuals of the full system at a candidate solution.
fn system_residual(
    g: &GMatrix,
    metric: &LocalMetric,
    mu: f64,
    sol: &NewtonSolution,
    r1: &DVector<f64>,
    r2: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let m = g.m();
    let k = sol.dxbar.len();
    let mut e1 = r1 - g.apply(&sol.dy, &sol.dxbar);
    {
        let mut tail = e1.rows_mut(m, k);
        tail += &sol.dsbar;
    }
    let e2 = r2 - &sol.dsbar - metric.apply_hessian(&sol.dxbar) * mu;
    (e1, e2)
}

/// `||e|| / (||r|| + ||terms||)` in the max norm.
fn backward_error(
    g: &GMatrix,
    metric: &LocalMetric,
    mu: f64,
    sol: &NewtonSolution,
    r1: &DVector<f64>,
    r2: &DVector<f64>,
) -> f64 {
    let (e1, e2) = system_residual(g, metric, mu, sol, r1, r2);
    let terms = g.apply(&sol.dy, &sol.dxbar).amax()
        + sol.dsbar.amax()
        + (metric.apply_hessian(&sol.dxbar) * mu).amax();
    let scale = r1.amax().max(r2.amax()) + terms;
    let err = e1.amax().max(e2.amax());
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn refine(
    factor: &dyn Factor,
    g: &GMatrix,
    metric: &LocalMetric,
    mu: f64,
    r1: &DVector<f64>,
    r2: &DVector<f64>,
) -> Result<NewtonSolution> {
    let mut sol = factor.solve_once(r1, r2)?;
    let (e1, e2) = system_residual(g, metric, mu, &sol, r1, r2);
    let corr = factor.solve_once(&e1, &e2)?;
    sol.dy += corr.dy;
    sol.dxbar += corr.dxbar;
    sol.dsbar += corr.dsbar;
    if sol
        .dy
        .iter()
        .chain(sol.dxbar.iter())
        .chain(sol.dsbar.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Conditioning { rcond: f64::NAN });
    }
    Ok(sol)
}

/// Solves the Newton system at the point whose Hessian metric is `metric`
/// (which must be the metric of the homogenized barrier at `xbar`).
pub(crate) fn solve(
    method: KktMethod,
    g: &GMatrix,
    metric: &LocalMetric,
    mu: f64,
    r1: &DVector<f64>,
    r2: &DVector<f64>,
) -> Result<NewtonSolution> {
    assert_eq!(r1.len(), g.m() + g.n() + 1);
    assert_eq!(r2.len(), g.n() + 1);
    match method {
        KktMethod::Reduced => {
            let reduced = ReducedFactor::new(g, metric, mu).and_then(|f| refine(&f, g, metric, mu, r1, r2));
            if let Ok(sol) = reduced {
                if backward_error(g, metric, mu, &sol, r1, r2) <= REDUCED_BACKWARD_ERROR {
                    return Ok(sol);
                }
            }
            let f = FullFactor::new(g, metric, mu)?;
            refine(&f, g, metric, mu, r1, r2)
        }
        KktMethod::Full => {
            let f = FullFactor::new(g, metric, mu)?;
            refine(&f, g, metric, mu, r1, r2)
        }
    }
}

struct ReducedFactor<'a> {
    g: &'a GMatrix,
    metric: &'a LocalMetric,
    mu: f64,
    a: DMatrix<f64>,
    /// `(mu H)^{-1} A^T`, `n x m`
    p_at: DMatrix<f64>,
    /// `(mu H)^{-1} c`
    p_c: DVector<f64>,
    lu: ScaledLu,
}

impl<'a> ReducedFactor<'a> {
    fn new(g: &'a GMatrix, metric: &'a LocalMetric, mu: f64) -> Result<Self> {
        let (m, n) = (g.m(), g.n());
        let a = g.a();
        let b = g.b();
        let c = g.c();
        let tau = metric.center()[n];
        let mut p_at = DMatrix::zeros(n, m);
        for i in 0..m {
            let col = Self::scaled_inverse(metric, mu, &a.row(i).transpose());
            p_at.set_column(i, &col);
        }
        let p_c = Self::scaled_inverse(metric, mu, &c);
        let a_pc = &a * &p_c;

        let mut mat = DMatrix::zeros(m + 1, m + 1);
        mat.view_mut((0, 0), (m, m)).copy_from(&(&a * &p_at));
        for i in 0..m {
            mat[(i, m)] = -(a_pc[i] + b[i]);
            mat[(m, i)] = b[i] - a_pc[i];
        }
        mat[(m, m)] = c.dot(&p_c) + mu / (tau * tau);
        let scale = DVector::from_iterator(
            m + 1,
            mat.diagonal().iter().map(|d| {
                if *d > 0.0 && d.is_finite() {
                    1.0 / d.sqrt()
                } else {
                    1.0
                }
            }),
        );
        let lu = ScaledLu::new(mat, scale.clone(), scale, 0.0)?;
        Ok(Self {
            g,
            metric,
            mu,
            a,
            p_at,
            p_c,
            lu,
        })
    }

    /// `(mu H_x)^{-1} v` for the cone block; the `tau` block is separate.
    fn scaled_inverse(metric: &LocalMetric, mu: f64, v: &DVector<f64>) -> DVector<f64> {
        let n = v.len();
        let mut padded = DVector::zeros(n + 1);
        padded.rows_mut(0, n).copy_from(v);
        let w = metric.solve(&padded);
        w.rows(0, n) / mu
    }
}

impl Factor for ReducedFactor<'_> {
    fn solve_once(&self, r1: &DVector<f64>, r2: &DVector<f64>) -> Result<NewtonSolution> {
        let (m, n) = (self.g.m(), self.g.n());
        let c = self.g.c();
        let q_y = r1.rows(0, m).into_owned();
        let q_x = r1.rows(m, n) + r2.rows(0, n);
        let q_tau = r1[m + n] + r2[n];
        let p_qx = Self::scaled_inverse(self.metric, self.mu, &q_x);

        let mut rhs = DVector::zeros(m + 1);
        rhs.rows_mut(0, m).copy_from(&(q_y - &self.a * &p_qx));
        rhs[m] = q_tau + c.dot(&p_qx);
        let sol = self.lu.solve(&rhs)?;
        let dy = sol.rows(0, m).into_owned();
        let dtau = sol[m];
        let dx = &p_qx + &self.p_at * &dy - &self.p_c * dtau;

        let mut dxbar = DVector::zeros(n + 1);
        dxbar.rows_mut(0, n).copy_from(&dx);
        dxbar[n] = dtau;
        let dsbar = r2 - self.metric.apply_hessian(&dxbar) * self.mu;
        Ok(NewtonSolution { dy, dxbar, dsbar })
    }
}

struct FullFactor<'a> {
    g: &'a GMatrix,
    lu: ScaledLu,
}

impl<'a> FullFactor<'a> {
    fn new(g: &'a GMatrix, metric: &LocalMetric, mu: f64) -> Result<Self> {
        let (m, n) = (g.m(), g.n());
        let k = m + n + 1;
        let size = k + n + 1;
        let mut mat = DMatrix::zeros(size, size);
        mat.view_mut((0, 0), (k, k)).copy_from(g.matrix());
        for i in 0..=n {
            mat[(m + i, k + i)] = -1.0;
            mat[(k + i, k + i)] = 1.0;
        }
        let h = metric.hessian() * mu;
        mat.view_mut((k, m), (n + 1, n + 1)).copy_from(&h);
        let row_scale = DVector::from_iterator(
            size,
            mat.row_iter().map(|r| {
                let mx = r.amax();
                if mx > 0.0 {
                    1.0 / mx
                } else {
                    1.0
                }
            }),
        );
        let lu = ScaledLu::new(mat, row_scale, DVector::from_element(size, 1.0), RCOND_THRESHOLD)?;
        Ok(Self { g, lu })
    }
}

impl Factor for FullFactor<'_> {
    fn solve_once(&self, r1: &DVector<f64>, r2: &DVector<f64>) -> Result<NewtonSolution> {
        let (m, n) = (self.g.m(), self.g.n());
        let k = m + n + 1;
        let mut rhs = DVector::zeros(k + n + 1);
        rhs.rows_mut(0, k).copy_from(r1);
        rhs.rows_mut(k, n + 1).copy_from(r2);
        let sol = self.lu.solve(&rhs)?;
        Ok(NewtonSolution {
            dy: sol.rows(0, m).into_owned(),
            dxbar: sol.rows(m, n + 1).into_owned(),
            dsbar: sol.rows(k, n + 1).into_owned(),
        })
    }
}
