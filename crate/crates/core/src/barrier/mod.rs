//! Logarithmically homogeneous barrier oracles and the local-norm calculus
//! built on top of them.
//!
//! A [`BarrierOracle`] evaluates `F`, its gradient `g` and Hessian `H` on the
//! interior of one cone. Oracles compose: [`BarrierOracle::product`] stacks
//! cones block-diagonally and [`BarrierOracle::homogenize`] appends the
//! `-log tau` term used by the homogeneous model.

mod exp_cone;
mod metric;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exp_cone::{exp_dual_interior, EXP_CONE_ANCHOR};
pub use metric::{conjugate_gradient_inverse, newton_step, LocalMetric};

/// Strict-interior margin applied to every defining expression of a cone.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Iteration cap for [`conjugate_gradient_inverse`].
pub const INVERSION_MAX_ITERS: usize = 200;

/// One diagonal block of a block-diagonal Hessian.
#[derive(Debug, Clone, PartialEq)]
pub enum HessianBlock {
    Diagonal {
        offset: usize,
        values: Vec<f64>,
    },
    /// `matrix = root^T root`; the root is factored instead of the matrix.
    Dense {
        offset: usize,
        matrix: DMatrix<f64>,
        root: DMatrix<f64>,
    },
}

impl HessianBlock {
    pub fn offset(&self) -> usize {
        match self {
            HessianBlock::Diagonal { offset, .. } | HessianBlock::Dense { offset, .. } => *offset,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn len(&self) -> usize {
        match self {
            HessianBlock::Diagonal { values, .. } => values.len(),
            HessianBlock::Dense { matrix, .. } => matrix.nrows(),
        }
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            HessianBlock::Diagonal { offset, values } => HessianBlock::Diagonal {
                offset: offset + by,
                values,
            },
            HessianBlock::Dense { offset, matrix, root } => HessianBlock::Dense {
                offset: offset + by,
                matrix,
                root,
            },
        }
    }
}

/// Barrier for a cone: a nonnegative orthant, the exponential cone, a
/// Cartesian product of those, or the homogenized extension `K x R_+`.
#[derive(Debug, Clone, PartialEq)]
pub enum BarrierOracle {
    /// `F(x) = -sum log x_i`, `nu = n`.
    Orthant { dim: usize },
    /// `F(x) = -log(x2 log(x1/x2) - x3) - log x1 - log x2`, `nu = 3`.
    ExpCone,
    Product {
        parts: Vec<BarrierOracle>,
        offsets: Vec<usize>,
        dim: usize,
        nu: f64,
    },
    /// `F(x) - log tau` on `(x; tau)`.
    Homogenized { inner: Box<BarrierOracle> },
}

/// Standard logarithmic barrier of the nonnegative orthant of dimension `n`.
pub fn log_barrier_orthant(n: usize) -> Result<BarrierOracle> {
    if n == 0 {
        return Err(Error::Configuration("orthant dimension must be positive".into()));
    }
    Ok(BarrierOracle::Orthant { dim: n })
}

/// Three-dimensional exponential-cone barrier with parameter 3.
pub fn exp_cone_barrier() -> BarrierOracle {
    BarrierOracle::ExpCone
}

impl BarrierOracle {
    /// Block-diagonal composition; parameters add.
    pub fn product(parts: Vec<BarrierOracle>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Configuration(
                "product barrier needs at least one part".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(parts.len());
        let mut dim = 0;
        let mut nu = 0.0;
        for p in &parts {
            offsets.push(dim);
            dim += p.dim();
            nu += p.nu();
        }
        Ok(BarrierOracle::Product {
            parts,
            offsets,
            dim,
            nu,
        })
    }

    /// Barrier for `K x R_+` on `(x; tau)`, parameter `nu + 1`.
    pub fn homogenize(self) -> Self {
        BarrierOracle::Homogenized {
            inner: Box::new(self),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BarrierOracle::Orthant { dim } => *dim,
            BarrierOracle::ExpCone => 3,
            BarrierOracle::Product { dim, .. } => *dim,
            BarrierOracle::Homogenized { inner } => inner.dim() + 1,
        }
    }

    /// Barrier parameter, stored analytically.
    pub fn nu(&self) -> f64 {
        match self {
            BarrierOracle::Orthant { dim } => *dim as f64,
            BarrierOracle::ExpCone => 3.0,
            BarrierOracle::Product { nu, .. } => *nu,
            BarrierOracle::Homogenized { inner } => inner.nu() + 1.0,
        }
    }

    /// A fixed interior point at which `-g(x) = x`, so that the pairing
    /// `(x, -g(x))` is perfectly centered with unit gap.
    pub fn anchor(&self) -> DVector<f64> {
        match self {
            BarrierOracle::Orthant { dim } => DVector::from_element(*dim, 1.0),
            BarrierOracle::ExpCone => DVector::from_column_slice(&EXP_CONE_ANCHOR),
            BarrierOracle::Product { parts, dim, .. } => {
                let mut out = Vec::with_capacity(*dim);
                for p in parts {
                    out.extend(p.anchor().iter());
                }
                DVector::from_vec(out)
            }
            BarrierOracle::Homogenized { inner } => {
                let mut v: Vec<f64> = inner.anchor().iter().copied().collect();
                v.push(1.0);
                DVector::from_vec(v)
            }
        }
    }

    /// Strict interior membership with margin [`INTERIOR_MARGIN`].
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            BarrierOracle::Orthant { .. } => x.iter().all(|&v| v > INTERIOR_MARGIN),
            BarrierOracle::ExpCone => exp_cone::contains(x),
            BarrierOracle::Product { parts, offsets, .. } => parts
                .iter()
                .zip(offsets)
                .all(|(p, &o)| p.contains(&x[o..o + p.dim()])),
            BarrierOracle::Homogenized { inner } => {
                let n = inner.dim();
                x[n] > INTERIOR_MARGIN && inner.contains(&x[..n])
            }
        }
    }

    /// Direct membership test for the interior of the dual cone.
    ///
    /// The solver never calls this; it certifies dual interiority through
    /// proximity. The verifier uses it as an independent check.
    pub fn dual_contains(&self, s: &[f64]) -> bool {
        if s.len() != self.dim() || s.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            BarrierOracle::Orthant { .. } => s.iter().all(|&v| v > 0.0),
            BarrierOracle::ExpCone => exp_dual_interior(s),
            BarrierOracle::Product { parts, offsets, .. } => parts
                .iter()
                .zip(offsets)
                .all(|(p, &o)| p.dual_contains(&s[o..o + p.dim()])),
            BarrierOracle::Homogenized { inner } => {
                let n = inner.dim();
                s[n] > 0.0 && inner.dual_contains(&s[..n])
            }
        }
    }

    fn require_interior(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Configuration(format!(
                "point has length {} but barrier dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        if !self.contains(x) {
            return Err(Error::InteriorViolation(self.describe()));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self {
            BarrierOracle::Orthant { dim } => format!("nonnegative orthant of dimension {dim}"),
            BarrierOracle::ExpCone => "exponential cone".into(),
            BarrierOracle::Product { parts, .. } => format!("product of {} cones", parts.len()),
            BarrierOracle::Homogenized { inner } => format!("{} x R_+", inner.describe()),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.require_interior(x)?;
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            BarrierOracle::Orthant { .. } => -x.iter().map(|v| v.ln()).sum::<f64>(),
            BarrierOracle::ExpCone => exp_cone::value(x),
            BarrierOracle::Product { parts, offsets, .. } => parts
                .iter()
                .zip(offsets)
                .map(|(p, &o)| p.value_unchecked(&x[o..o + p.dim()]))
                .sum(),
            BarrierOracle::Homogenized { inner } => {
                let n = inner.dim();
                inner.value_unchecked(&x[..n]) - x[n].ln()
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.require_interior(x)?;
        let mut g = DVector::zeros(x.len());
        self.gradient_into(x, g.as_mut_slice());
        Ok(g)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            BarrierOracle::Orthant { .. } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = -1.0 / v;
                }
            }
            BarrierOracle::ExpCone => out.copy_from_slice(&exp_cone::gradient(x)),
            BarrierOracle::Product { parts, offsets, .. } => {
                for (p, &o) in parts.iter().zip(offsets) {
                    let d = p.dim();
                    p.gradient_into(&x[o..o + d], &mut out[o..o + d]);
                }
            }
            BarrierOracle::Homogenized { inner } => {
                let n = inner.dim();
                inner.gradient_into(&x[..n], &mut out[..n]);
                out[n] = -1.0 / x[n];
            }
        }
    }

    /// Hessian as a list of diagonal blocks covering `0..dim`.
    pub fn hessian_blocks(&self, x: &[f64]) -> Result<Vec<HessianBlock>> {
        self.require_interior(x)?;
        let mut out = Vec::new();
        self.blocks_into(x, 0, &mut out);
        Ok(out)
    }

    fn blocks_into(&self, x: &[f64], base: usize, out: &mut Vec<HessianBlock>) {
        match self {
            BarrierOracle::Orthant { .. } => out.push(HessianBlock::Diagonal {
                offset: base,
                values: x.iter().map(|v| 1.0 / (v * v)).collect(),
            }),
            BarrierOracle::ExpCone => {
                let root = exp_cone::hessian_root(x);
                out.push(HessianBlock::Dense {
                    offset: base,
                    matrix: exp_cone::hessian(x),
                    root,
                })
            }
            BarrierOracle::Product { parts, offsets, .. } => {
                for (p, &o) in parts.iter().zip(offsets) {
                    let mut inner = Vec::new();
                    p.blocks_into(&x[o..o + p.dim()], 0, &mut inner);
                    out.extend(inner.into_iter().map(|b| b.shifted(base + o)));
                }
            }
            BarrierOracle::Homogenized { inner } => {
                let n = inner.dim();
                inner.blocks_into(&x[..n], base, out);
                let t = x[n];
                out.push(HessianBlock::Diagonal {
                    offset: base + n,
                    values: vec![1.0 / (t * t)],
                });
            }
        }
    }

    /// Dense symmetric Hessian.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let blocks = self.hessian_blocks(x)?;
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        for b in blocks {
            match b {
                HessianBlock::Diagonal { offset, values } => {
                    for (i, v) in values.into_iter().enumerate() {
                        h[(offset + i, offset + i)] = v;
                    }
                }
                HessianBlock::Dense { offset, matrix, .. } => {
                    let k = matrix.nrows();
                    h.view_mut((offset, offset), (k, k)).copy_from(&matrix);
                }
            }
        }
        Ok(h)
    }

    /// Factored local metric at `x`.
    pub fn local_metric(&self, x: &[f64]) -> Result<LocalMetric> {
        LocalMetric::new(self, x)
    }
}

/// One primitive cone of a [`ConeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimitiveCone {
    Nonnegative(usize),
    Exponential,
}

impl PrimitiveCone {
    pub fn dim(&self) -> usize {
        match self {
            PrimitiveCone::Nonnegative(n) => *n,
            PrimitiveCone::Exponential => 3,
        }
    }

    pub fn barrier(&self) -> Result<BarrierOracle> {
        match self {
            PrimitiveCone::Nonnegative(n) => log_barrier_orthant(*n),
            PrimitiveCone::Exponential => Ok(exp_cone_barrier()),
        }
    }
}

/// Ordered product of primitive cones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConeSpec {
    pub cones: Vec<PrimitiveCone>,
}

impl ConeSpec {
    pub fn new(cones: Vec<PrimitiveCone>) -> Self {
        Self { cones }
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(PrimitiveCone::dim).sum()
    }

    /// Barrier of the product cone. A single primitive cone is returned as is.
    pub fn barrier(&self) -> Result<BarrierOracle> {
        let mut parts = self
            .cones
            .iter()
            .map(PrimitiveCone::barrier)
            .collect::<Result<Vec<_>>>()?;
        match parts.len() {
            0 => Err(Error::Configuration("cone specification is empty".into())),
            1 => Ok(parts.pop().unwrap()),
            _ => BarrierOracle::product(parts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_identity_point() {
        let f = log_barrier_orthant(2).unwrap();
        let g = f.gradient(&[1.0, 1.0]).unwrap();
        assert_eq!(g.as_slice(), &[-1.0, -1.0]);
        assert_eq!(f.hessian(&[1.0, 1.0]).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn orthant_hand_evaluation() {
        let f = log_barrier_orthant(2).unwrap();
        let x = [2.0, 4.0];
        assert_close!(f.value(&x).unwrap(), -(8.0f64).ln(), 1e-15);
        assert_close!(f.value(&x).unwrap(), -2.0794, 1e-4);
        assert_eq!(f.gradient(&x).unwrap().as_slice(), &[-0.5, -0.25]);
    }

    #[test]
    fn orthant_dual_norm_of_gradient_is_sqrt_two() {
        let f = log_barrier_orthant(2).unwrap();
        for x in [[1.0, 1.0], [0.3, 7.0], [1e-3, 2e2]] {
            let m = f.local_metric(&x).unwrap();
            let g = f.gradient(&x).unwrap();
            assert_close!(m.dual_norm(&g), 2f64.sqrt(), 1e-12);
        }
    }

    #[test]
    fn zero_dimensional_orthant_rejected() {
        assert!(matches!(log_barrier_orthant(0), Err(Error::Configuration(_))));
    }

    #[test]
    fn exp_cone_boundary_is_rejected() {
        let f = exp_cone_barrier();
        let e = std::f64::consts::E;
        assert!(matches!(
            f.value(&[e, 1.0, 1.0]),
            Err(Error::InteriorViolation(_))
        ));
        assert!(matches!(
            f.gradient(&[1.0, -1.0, 0.0]),
            Err(Error::InteriorViolation(_))
        ));
    }

    #[test]
    fn exp_cone_hand_substitution() {
        // x2 log(x1/x2) - x3 = log(2e) - 1 = log 2
        let f = exp_cone_barrier();
        let e = std::f64::consts::E;
        let expected = -(2f64.ln()).ln() - (2.0 * e).ln();
        assert_close!(f.value(&[2.0 * e, 1.0, 1.0]).unwrap(), expected, 1e-14);
    }

    #[test]
    fn exp_cone_gradient_dual_norm() {
        let f = exp_cone_barrier();
        for x in [[3.0, 1.0, 0.5], [1.0, 2.0, -4.0], [10.0, 0.1, 0.2]] {
            let m = f.local_metric(&x).unwrap();
            let g = f.gradient(&x).unwrap();
            assert_close!(m.dual_norm(&g), 3f64.sqrt(), 1e-8);
        }
    }

    #[test]
    fn product_parameters_add() {
        let p = BarrierOracle::product(vec![log_barrier_orthant(2).unwrap(), exp_cone_barrier()]).unwrap();
        assert_eq!(p.nu(), 5.0);
        assert_eq!(p.dim(), 5);
        assert!(matches!(
            BarrierOracle::product(vec![]),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn product_of_scalar_orthants_matches_orthant() {
        let p = BarrierOracle::product(vec![
            log_barrier_orthant(1).unwrap(),
            log_barrier_orthant(1).unwrap(),
        ])
        .unwrap();
        let o = log_barrier_orthant(2).unwrap();
        let x = [0.7, 3.1];
        assert_eq!(p.value(&x).unwrap(), o.value(&x).unwrap());
        assert_eq!(p.gradient(&x).unwrap(), o.gradient(&x).unwrap());
        assert_eq!(p.hessian(&x).unwrap(), o.hessian(&x).unwrap());
    }

    #[test]
    fn single_part_product_behaves_like_part() {
        let e = exp_cone_barrier();
        let p = BarrierOracle::product(vec![e.clone()]).unwrap();
        let x = [3.0, 1.0, 0.5];
        assert_eq!(p.value(&x).unwrap(), e.value(&x).unwrap());
        assert_eq!(p.gradient(&x).unwrap(), e.gradient(&x).unwrap());
        assert_eq!(p.hessian(&x).unwrap(), e.hessian(&x).unwrap());
        assert_eq!(p.nu(), e.nu());
    }

    #[test]
    fn homogenized_orthant() {
        let fb = log_barrier_orthant(2).unwrap().homogenize();
        assert_eq!(fb.nu(), 3.0);
        let one = [1.0, 1.0, 1.0];
        assert_eq!(fb.gradient(&one).unwrap().as_slice(), &[-1.0, -1.0, -1.0]);
        assert_eq!(fb.hessian(&one).unwrap(), DMatrix::identity(3, 3));
        let o3 = log_barrier_orthant(3).unwrap();
        let x = [0.4, 2.5, 1.7];
        assert_eq!(fb.value(&x).unwrap(), o3.value(&x).unwrap());
        assert_eq!(fb.gradient(&x).unwrap(), o3.gradient(&x).unwrap());
        assert_eq!(fb.hessian(&x).unwrap(), o3.hessian(&x).unwrap());
        assert!(matches!(
            fb.value(&[1.0, 1.0, 0.0]),
            Err(Error::InteriorViolation(_))
        ));
    }

    #[test]
    fn anchors_are_self_dual_fixed_points() {
        let spec = ConeSpec::new(vec![PrimitiveCone::Nonnegative(2), PrimitiveCone::Exponential]);
        let fb = spec.barrier().unwrap().homogenize();
        let a = fb.anchor();
        let g = fb.gradient(a.as_slice()).unwrap();
        assert!((a + g).amax() < 1e-12);
    }

    #[test]
    fn dual_membership_of_negative_gradient() {
        let f = exp_cone_barrier();
        for x in [[3.0, 1.0, 0.5], [1.0, 2.0, -4.0], [10.0, 0.1, 0.2]] {
            let s = -f.gradient(&x).unwrap();
            assert!(f.dual_contains(s.as_slice()));
        }
        assert!(!f.dual_contains(&[1.0, 0.0, 1.0]));
    }
}
