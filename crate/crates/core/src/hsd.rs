//! The homogeneous self-dual embedding
//!
//! ```text
//!          A x - b tau          = 0
//!  -A^T y      + c tau - s      = 0
//!   b^T y - c^T x        - kappa = 0
//! ```
//!
//! written compactly as `G (y; xbar) - (0; sbar) = 0` with `xbar = (x; tau)`
//! and `sbar = (s; kappa)`.

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::barrier::{BarrierOracle, ConeSpec};
use crate::error::{Error, Result};

/// `min c^T x  s.t.  A x = b, x in K` together with its conic dual.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub cones: ConeSpec,
}

impl ConicProblem {
    /// Validates dimensions, the cone layout and full row rank of `A`.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, cones: ConeSpec) -> Result<Self> {
        let (m, n) = a.shape();
        if n == 0 {
            return Err(Error::Configuration("problem has no variables".into()));
        }
        if b.len() != m {
            return Err(Error::Configuration(format!(
                "b has length {} but A has {m} rows",
                b.len()
            )));
        }
        if c.len() != n {
            return Err(Error::Configuration(format!(
                "c has length {} but A has {n} columns",
                c.len()
            )));
        }
        if cones.dim() != n {
            return Err(Error::Configuration(format!(
                "cone dimensions sum to {} but the problem has {n} variables",
                cones.dim()
            )));
        }
        if m > n {
            return Err(Error::Configuration(format!(
                "A has more rows ({m}) than columns ({n})"
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Configuration("problem data must be finite".into()));
        }
        cones.barrier()?;
        if m > 0 {
            let sv = a.clone().svd(false, false).singular_values;
            let top = sv.max();
            let low = sv.min();
            if !(low > top * (n as f64) * f64::EPSILON) {
                return Err(Error::Configuration(format!(
                    "A is not of full row rank (smallest singular value {low:.3e})"
                )));
            }
        }
        Ok(Self { a, b, c, cones })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Barrier of `K`.
    pub fn barrier(&self) -> Result<BarrierOracle> {
        self.cones.barrier()
    }

    /// Barrier of `K x R_+` acting on `xbar`.
    pub fn homogenized_barrier(&self) -> Result<BarrierOracle> {
        Ok(self.barrier()?.homogenize())
    }
}

/// Full iterate `z = (xbar; y; sbar)`; the last entries of `xbar` and `sbar`
/// are `tau` and `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsdPoint {
    pub xbar: DVector<f64>,
    pub y: DVector<f64>,
    pub sbar: DVector<f64>,
}

impl HsdPoint {
    pub fn new(xbar: DVector<f64>, y: DVector<f64>, sbar: DVector<f64>) -> Self {
        assert_eq!(xbar.len(), sbar.len(), "xbar and sbar must have equal length");
        Self { xbar, y, sbar }
    }

    /// Number of cone variables `n` (excluding `tau`).
    pub fn n(&self) -> usize {
        self.xbar.len() - 1
    }

    pub fn tau(&self) -> f64 {
        self.xbar[self.n()]
    }

    pub fn kappa(&self) -> f64 {
        self.sbar[self.n()]
    }

    pub fn x(&self) -> DVectorView<'_, f64> {
        self.xbar.rows(0, self.n())
    }

    pub fn s(&self) -> DVectorView<'_, f64> {
        self.sbar.rows(0, self.n())
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(&self.xbar * t, &self.y * t, &self.sbar * t)
    }

    /// `(y; xbar)`, the vector `G` acts on.
    pub fn stacked(&self) -> DVector<f64> {
        let m = self.y.len();
        let mut v = DVector::zeros(m + self.xbar.len());
        v.rows_mut(0, m).copy_from(&self.y);
        v.rows_mut(m, self.xbar.len()).copy_from(&self.xbar);
        v
    }
}

/// The skew-symmetric matrix
///
/// ```text
///      [  0    A   -b ]
///  G = [ -A^T  0    c ]
///      [  b^T -c^T  0 ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    m: usize,
    n: usize,
    mat: DMatrix<f64>,
}

impl GMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn a(&self) -> DMatrix<f64> {
        self.mat.view((0, self.m), (self.m, self.n)).into_owned()
    }

    pub fn b(&self) -> DVector<f64> {
        -self.mat.view((0, self.m + self.n), (self.m, 1)).column(0)
    }

    pub fn c(&self) -> DVector<f64> {
        self.mat
            .view((self.m, self.m + self.n), (self.n, 1))
            .column(0)
            .into_owned()
    }

    /// `G (y; xbar)`
    pub fn apply(&self, y: &DVector<f64>, xbar: &DVector<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.m + self.n + 1);
        v.rows_mut(0, self.m).copy_from(y);
        v.rows_mut(self.m, self.n + 1).copy_from(xbar);
        &self.mat * v
    }
}

pub fn build_g(p: &ConicProblem) -> Result<GMatrix> {
    let (m, n) = p.a.shape();
    if p.b.len() != m || p.c.len() != n {
        return Err(Error::Configuration(format!(
            "inconsistent dimensions: A is {m}x{n}, b has {}, c has {}",
            p.b.len(),
            p.c.len()
        )));
    }
    let k = m + n + 1;
    let mut mat = DMatrix::zeros(k, k);
    for i in 0..m {
        for j in 0..n {
            mat[(i, m + j)] = p.a[(i, j)];
            mat[(m + j, i)] = -p.a[(i, j)];
        }
        mat[(i, m + n)] = -p.b[i];
        mat[(m + n, i)] = p.b[i];
    }
    for j in 0..n {
        mat[(m + j, m + n)] = p.c[j];
        mat[(m + n, m + j)] = -p.c[j];
    }
    debug_assert!(mat.iter().zip(mat.transpose().iter()).all(|(a, b)| *a == -*b));
    Ok(GMatrix { m, n, mat })
}

/// `G (y; xbar) - (0; sbar)`; zero exactly when `z` satisfies the linear part
/// of the embedding.
pub fn residual(g: &GMatrix, z: &HsdPoint) -> DVector<f64> {
    let mut r = g.apply(&z.y, &z.xbar);
    let m = g.m();
    let mut tail = r.rows_mut(m, z.sbar.len());
    tail -= &z.sbar;
    r
}

/// Complementarity gap `xbar^T sbar / nubar`.
pub fn mu(z: &HsdPoint, nubar: f64) -> f64 {
    z.xbar.dot(&z.sbar) / nubar
}

/// `psi(xbar, sbar, t) = sbar + t gbar(xbar)`.
pub fn psi(xbar: &DVector<f64>, sbar: &DVector<f64>, t: f64, fbar: &BarrierOracle) -> Result<DVector<f64>> {
    let g = fbar.gradient(xbar.as_slice())?;
    Ok(sbar + g * t)
}

/// `||psi(xbar, sbar, mu(z))||*_xbar / mu(z)`.
pub fn proximity(z: &HsdPoint, fbar: &BarrierOracle) -> Result<f64> {
    let metric = fbar.local_metric(z.xbar.as_slice())?;
    proximity_with(z, fbar, &metric)
}

/// [`proximity`] with an already factored metric at `z.xbar`.
pub fn proximity_with(z: &HsdPoint, fbar: &BarrierOracle, metric: &crate::LocalMetric) -> Result<f64> {
    let m = mu(z, fbar.nu());
    if !(m > 0.0) {
        return Err(Error::DegeneratePoint { mu: m });
    }
    let p = psi(&z.xbar, &z.sbar, m, fbar)?;
    Ok(metric.dual_norm(&p) / m)
}

/// Proximity, or `+inf` when `xbar` is not interior or the gap is not
/// positive. Used to probe trial points.
pub fn proximity_or_inf(z: &HsdPoint, fbar: &BarrierOracle) -> f64 {
    if !fbar.contains(z.xbar.as_slice()) {
        return f64::INFINITY;
    }
    proximity(z, fbar).unwrap_or(f64::INFINITY)
}

/// `z` in `N(theta)`: `xbar` interior, positive gap, proximity at most
/// `theta`. `sbar` is certified dual-interior by proximity strictly below one.
pub fn in_neighborhood(z: &HsdPoint, theta: f64, fbar: &BarrierOracle) -> bool {
    let p = proximity_or_inf(z, fbar);
    p <= theta && p < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::PrimitiveCone;

    fn small_lp() -> ConicProblem {
        ConicProblem::new(
            DMatrix::from_row_slice(1, 2, &[5.0, -3.0]),
            DVector::from_vec(vec![12.0]),
            DVector::from_vec(vec![2.0, 3.0]),
            ConeSpec::new(vec![PrimitiveCone::Nonnegative(2)]),
        )
        .unwrap()
    }

    fn point(x: [f64; 2], tau: f64, y: f64, s: [f64; 2], kappa: f64) -> HsdPoint {
        HsdPoint::new(
            DVector::from_vec(vec![x[0], x[1], tau]),
            DVector::from_vec(vec![y]),
            DVector::from_vec(vec![s[0], s[1], kappa]),
        )
    }

    #[test]
    fn g_layout_on_small_lp() {
        let g = build_g(&small_lp()).unwrap();
        let mat = g.matrix();
        assert_eq!(
            mat.row(0).iter().copied().collect::<Vec<_>>(),
            vec![0.0, 5.0, -3.0, -12.0]
        );
        assert_eq!(
            mat.row(3).iter().copied().collect::<Vec<_>>(),
            vec![12.0, -2.0, -3.0, 0.0]
        );
        assert_eq!(mat + mat.transpose(), DMatrix::zeros(4, 4));
        assert_eq!(g.a(), small_lp().a);
        assert_eq!(g.b(), small_lp().b);
        assert_eq!(g.c(), small_lp().c);
    }

    #[test]
    fn g_without_equality_rows() {
        let p = ConicProblem::new(
            DMatrix::zeros(0, 2),
            DVector::zeros(0),
            DVector::from_vec(vec![1.0, -2.0]),
            ConeSpec::new(vec![PrimitiveCone::Nonnegative(2)]),
        )
        .unwrap();
        let g = build_g(&p).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, -2.0, -1.0, 2.0, 0.0]);
        assert_eq!(g.matrix(), &expected);
    }

    #[test]
    fn problem_validation() {
        let cones = ConeSpec::new(vec![PrimitiveCone::Nonnegative(2)]);
        let rank_deficient = ConicProblem::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]),
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            cones.clone(),
        );
        assert!(matches!(rank_deficient, Err(Error::Configuration(_))));
        let wrong_cone = ConicProblem::new(
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            DVector::from_vec(vec![1.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            ConeSpec::new(vec![PrimitiveCone::Nonnegative(3)]),
        );
        assert!(matches!(wrong_cone, Err(Error::Configuration(_))));
    }

    #[test]
    fn residual_of_feasible_point_vanishes() {
        // x = (3, 1) gives A x = 12 = b tau with tau = 1; choose y = 0,
        // s = c tau, kappa = b^T y - c^T x = -9 is not a cone point but the
        // linear residual is still exactly zero.
        let g = build_g(&small_lp()).unwrap();
        let z = point([3.0, 1.0], 1.0, 0.0, [2.0, 3.0], -9.0);
        assert_eq!(residual(&g, &z), DVector::zeros(4));
    }

    #[test]
    fn residual_scales_linearly() {
        let g = build_g(&small_lp()).unwrap();
        let z = point([0.9310, 0.6995], 0.8511, 0.0224, [0.8246, 1.0891], 0.9023);
        let r = residual(&g, &z);
        assert_eq!(r.len(), 4);
        assert!(r.amax() > 0.1);
        let r2 = residual(&g, &z.scaled(2.5));
        assert!((r2 - r * 2.5).amax() < 1e-12);
    }

    #[test]
    fn mu_of_printed_points() {
        let z = point([0.9310, 0.6995], 0.8511, 0.0224, [0.8246, 1.0891], 0.9023);
        // 0.9310*0.8246 + 0.6995*1.0891 + 0.8511*0.9023 = 2.29747558
        assert_close!(mu(&z, 3.0), 2.297_475_58 / 3.0, 1e-12);
        assert_close!(mu(&z, 3.0), 0.7658, 1e-4);
        let z = point([0.9830, 0.9304], 0.9670, 0.0042, [0.9650, 1.0176], 0.9810);
        // 0.948595 + 0.94677504 + 0.948627 = 2.84399704
        assert_close!(mu(&z, 3.0), 2.843_997_04 / 3.0, 1e-12);
        let ones = HsdPoint::new(
            DVector::from_element(3, 1.0),
            DVector::zeros(1),
            DVector::from_element(3, 1.0),
        );
        assert_eq!(mu(&ones, 3.0), 1.0);
    }

    #[test]
    fn psi_vanishes_at_central_point() {
        let fbar = small_lp().homogenized_barrier().unwrap();
        let xbar = DVector::from_vec(vec![0.5, 2.0, 1.5]);
        let m = 0.7;
        let sbar = -fbar.gradient(xbar.as_slice()).unwrap() * m;
        let p = psi(&xbar, &sbar, m, &fbar).unwrap();
        assert!(p.amax() < 1e-15);
        let z = HsdPoint::new(xbar, DVector::zeros(1), sbar);
        assert!(proximity(&z, &fbar).unwrap() < 1e-15);
        assert!(in_neighborhood(&z, 1e-12, &fbar));
    }

    #[test]
    fn printed_points_lie_in_their_neighborhoods() {
        let fbar = small_lp().homogenized_barrier().unwrap();
        let zp = point([0.9310, 0.6995], 0.8511, 0.0224, [0.8246, 1.0891], 0.9023);
        assert!(proximity(&zp, &fbar).unwrap() <= 0.15);
        assert!(in_neighborhood(&zp, 0.15, &fbar));
        let m = mu(&zp, 3.0);
        let p = psi(&zp.xbar, &zp.sbar, m, &fbar).unwrap();
        assert!(p.amax() > 0.0);
        let zc = point([0.9830, 0.9304], 0.9670, 0.0042, [0.9650, 1.0176], 0.9810);
        assert!(proximity(&zc, &fbar).unwrap() <= 0.30);
    }

    #[test]
    fn boundary_and_degenerate_points() {
        let fbar = small_lp().homogenized_barrier().unwrap();
        let z = point([0.0, 1.0], 1.0, 0.0, [1.0, 1.0], 1.0);
        assert!(!in_neighborhood(&z, 1.0, &fbar));
        assert!(matches!(proximity(&z, &fbar), Err(Error::InteriorViolation(_))));
        assert_eq!(proximity_or_inf(&z, &fbar), f64::INFINITY);
        let z = point([1.0, 1.0], 1.0, 0.0, [-1.0, -1.0], -1.0);
        assert!(matches!(proximity(&z, &fbar), Err(Error::DegeneratePoint { .. })));
    }
}
