//! One-forms and two-forms on the chart.
//!
//! A [`TwoForm`] is stored as the matrix `M` with `Φ(X, Y) = Xᵀ M Y`, which
//! corresponds to the wedge pairing `(dx_a ∧ dx_b)(X, Y) = X_a Y_b − X_b Y_a`
//! (no factor ½).
//!
//! For `d_J L = Jᵀ ∇L` the Kähler form `Φ_L^J = −d d_J L` has matrix
//! `−(J·Hess + Hess·J)`. [`kahler_two_form`] always assembles the form twice,
//! once from that identity and once from the sixteen coordinate wedge terms,
//! and refuses to return a result if they disagree.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::calculus::{jet, Order, Point, ScalarField};
use crate::coordinates;
use crate::error::{check_len, Error, Result};
use crate::structure::{ChartDim, StructureKind, StructureOperator};

/// Antisymmetry tolerance for stored two-forms.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;
/// Agreement required between the compact and wedge assemblies, relative to
/// `max(1, max |Hess|)`.
pub const ASSEMBLY_TOL: f64 = 1e-10;
/// Metric compatibility threshold.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneForm {
    pub components: DVector<f64>,
}

impl OneForm {
    pub fn new(components: DVector<f64>) -> Self {
        OneForm { components }
    }

    /// Pairing with a vector.
    pub fn apply(&self, v: &DVector<f64>) -> Result<f64> {
        check_len(self.components.len(), v.len())?;
        Ok(self.components.dot(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoForm {
    matrix: DMatrix<f64>,
}

impl TwoForm {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_len(matrix.nrows(), matrix.ncols())?;
        let asym = (&matrix + matrix.transpose()).amax();
        if asym.is_nan() || asym > ANTISYMMETRY_TOL {
            return Err(Error::Inconsistent {
                what: "two-form antisymmetry".into(),
                deviation: asym,
            });
        }
        Ok(TwoForm { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `Φ(X, Y) = Xᵀ M Y`
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        check_len(self.matrix.nrows(), x.len())?;
        check_len(self.matrix.nrows(), y.len())?;
        Ok(x.dot(&(&self.matrix * y)))
    }
}

/// Constant symmetric positive-definite metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    matrix: DMatrix<f64>,
}

impl MetricTensor {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidMetric(format!(
                "metric must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym.is_nan() || asym > 1e-12 {
            return Err(Error::InvalidMetric(format!("not symmetric (deviation {asym:.3e})")));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::InvalidMetric("not positive definite".into()));
        }
        Ok(MetricTensor { matrix })
    }

    /// The Euclidean metric.
    pub fn euclidean(dim: ChartDim) -> Self {
        MetricTensor {
            matrix: DMatrix::identity(dim.total(), dim.total()),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Compatibility {
    pub compatible: bool,
    pub max_violation: f64,
}

/// `max_{a,b} |g(J e_a, e_b) + g(e_a, J e_b)|`, i.e. the largest entry of
/// `Jᵀ g + g J`.
pub fn metric_compatibility(g: &MetricTensor, op: &StructureOperator) -> Result<Compatibility> {
    matrix_compatibility(&g.matrix, op)
}

/// [`metric_compatibility`] for a bare matrix, which need not be positive
/// definite.
pub fn matrix_compatibility(g: &DMatrix<f64>, op: &StructureOperator) -> Result<Compatibility> {
    check_len(op.dim().total(), g.nrows())?;
    check_len(op.dim().total(), g.ncols())?;
    let j = op.to_dense();
    let max_violation = (j.transpose() * g + g * &j).amax();
    Ok(Compatibility {
        compatible: max_violation < COMPATIBILITY_TOL,
        max_violation,
    })
}

/// The fundamental forms `Φ(X,Y) = g(FX,Y)`, `Ψ(X,Y) = g(GX,Y)`,
/// `Θ(X,Y) = g(HX,Y)`, with matrices `Fᵀg`, `Gᵀg`, `Hᵀg`.
pub fn fundamental_two_forms(g: &MetricTensor, dim: ChartDim) -> Result<(TwoForm, TwoForm, TwoForm)> {
    let mut forms = Vec::with_capacity(3);
    for kind in StructureKind::ALL {
        let op = StructureOperator::build(kind, dim);
        let c = metric_compatibility(g, &op)?;
        if !c.compatible {
            return Err(Error::Incompatible {
                kind,
                violation: c.max_violation,
            });
        }
        forms.push(TwoForm::new(op.to_dense().transpose() * &g.matrix)?);
    }
    let theta = forms.pop().unwrap();
    let psi = forms.pop().unwrap();
    let phi = forms.pop().unwrap();
    Ok((phi, psi, theta))
}

/// `d_J L` at `p`, assembled from the coordinate pattern of the vertical
/// differentiation.
pub fn vertical_differential(field: &dyn ScalarField, p: &Point, op: &StructureOperator) -> Result<OneForm> {
    check_len(op.dim().total(), field.dim().total())?;
    let j = jet(field, p, Order::Gradient)?;
    Ok(OneForm::new(coordinates::vertical_differential(
        op.kind(),
        op.dim(),
        &j.gradient,
    )))
}

/// `−(J·Hess + Hess·J)`
pub fn compact_kahler_matrix(op: &StructureOperator, hessian: &DMatrix<f64>) -> DMatrix<f64> {
    let j = op.to_dense();
    -(&j * hessian + hessian * &j)
}

/// Builds `Φ_L^J` from a Hessian by both routes and returns the compact one.
pub fn kahler_from_hessian(op: &StructureOperator, hessian: &DMatrix<f64>) -> Result<TwoForm> {
    check_len(op.dim().total(), hessian.nrows())?;
    let compact = compact_kahler_matrix(op, hessian);
    let literal = coordinates::wedge_matrix(op.kind(), op.dim(), hessian);
    let deviation = (&compact - &literal).amax();
    if deviation.is_nan() || deviation > ASSEMBLY_TOL * hessian.amax().max(1.0) {
        return Err(Error::Inconsistent {
            what: format!("Kähler form assembly for {}", op.kind()),
            deviation,
        });
    }
    TwoForm::new(compact)
}

/// `Φ_L^J = −d d_J L` at `p`.
pub fn kahler_two_form(field: &dyn ScalarField, p: &Point, op: &StructureOperator) -> Result<TwoForm> {
    check_len(op.dim().total(), field.dim().total())?;
    let j = jet(field, p, Order::Hessian)?;
    kahler_from_hessian(op, &j.hessian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::BuiltinLagrangian;
    use crate::dsl::DslField;

    fn dim1() -> ChartDim {
        ChartDim::new(1).unwrap()
    }

    fn op(kind: StructureKind) -> StructureOperator {
        StructureOperator::build(kind, dim1())
    }

    fn at(c: &[f64]) -> Point {
        Point::from_slice(c).unwrap()
    }

    #[test]
    fn vertical_differential_examples() {
        let l = BuiltinLagrangian::FreeQuadratic { m: 1.0 }.into_field(dim1()).unwrap();
        let d = vertical_differential(&l, &at(&[1.0, 2.0, 3.0, 4.0]), &op(StructureKind::F)).unwrap();
        assert_eq!(d.components.as_slice(), &[2.0, -1.0, 4.0, -3.0]);

        let c = DslField::parse("3.5", dim1()).unwrap();
        for kind in StructureKind::ALL {
            let d = vertical_differential(&c, &at(&[1.0, 2.0, 3.0, 4.0]), &op(kind)).unwrap();
            assert_eq!(d.components, DVector::zeros(4));
        }

        let g = BuiltinLagrangian::Gravity { m: 1.0, g: 9.8 }
            .into_field(dim1())
            .unwrap();
        let p = at(&[3.0, 0.0, 4.0, 0.0]);
        let gop = op(StructureKind::G);
        let d = vertical_differential(&g, &p, &gop).unwrap();
        let grad = jet(&g, &p, Order::Gradient).unwrap().gradient;
        assert_eq!(d.components, -gop.apply(&grad).unwrap());
    }

    #[test]
    fn free_quadratic_kahler_form() {
        let l = BuiltinLagrangian::FreeQuadratic { m: 1.0 }.into_field(dim1()).unwrap();
        let phi = kahler_two_form(&l, &at(&[0.1, 0.2, 0.3, 0.4]), &op(StructureKind::F)).unwrap();
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 1)] = 2.0;
        expected[(1, 0)] = -2.0;
        expected[(2, 3)] = 2.0;
        expected[(3, 2)] = -2.0;
        assert_eq!(phi.matrix(), &expected);
    }

    #[test]
    fn constant_field_gives_zero_form() {
        let c = DslField::parse("-2", dim1()).unwrap();
        for kind in StructureKind::ALL {
            let phi = kahler_two_form(&c, &at(&[1.0, 2.0, 3.0, 4.0]), &op(kind)).unwrap();
            assert_eq!(phi.matrix(), &DMatrix::zeros(4, 4));
        }
    }

    #[test]
    fn anisotropic_kahler_form_for_g() {
        let w = vec![1.0, 2.0, 3.0, 4.0];
        let l = BuiltinLagrangian::AnisotropicQuadratic { weights: w.clone() }
            .into_field(dim1())
            .unwrap();
        let gop = op(StructureKind::G);
        let phi = kahler_two_form(&l, &at(&[1.0, 1.0, 1.0, 1.0]), &gop).unwrap();
        let dw = DMatrix::from_diagonal(&DVector::from_vec(w));
        let gm = gop.to_dense();
        let expected = -(&gm * &dw + &dw * &gm);
        assert_eq!(phi.matrix(), &expected);
        assert!((phi.matrix() + phi.matrix().transpose()).amax() == 0.0);
    }

    #[test]
    fn wedge_mismatch_is_reported() {
        // a non-symmetric "Hessian" breaks the mixed-partial assumption the
        // wedge expansion relies on
        let mut h = DMatrix::identity(4, 4);
        h[(0, 2)] = 1.0;
        let err = kahler_from_hessian(&op(StructureKind::F), &h).unwrap_err();
        assert!(matches!(err, Error::Inconsistent { .. }));
    }

    #[test]
    fn fundamental_forms() {
        let (phi, psi, theta) = fundamental_two_forms(&MetricTensor::euclidean(dim1()), dim1()).unwrap();
        assert_eq!(phi.matrix(), &-op(StructureKind::F).to_dense());
        assert_eq!(psi.matrix(), &-op(StructureKind::G).to_dense());
        assert_eq!(theta.matrix(), &-op(StructureKind::H).to_dense());

        let g2 = MetricTensor::new(DMatrix::identity(4, 4) * 2.0).unwrap();
        let (phi, _, _) = fundamental_two_forms(&g2, dim1()).unwrap();
        assert_eq!(phi.matrix(), &(op(StructureKind::F).to_dense() * -2.0));

        let skewed = MetricTensor::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0, 2.0]))).unwrap();
        match fundamental_two_forms(&skewed, dim1()) {
            Err(Error::Incompatible { kind, violation }) => {
                assert_eq!(kind, StructureKind::G);
                assert_eq!(violation, 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(metric_compatibility(&skewed, &op(StructureKind::F)).unwrap().compatible);
        assert!(!metric_compatibility(&skewed, &op(StructureKind::H)).unwrap().compatible);
    }

    #[test]
    fn compatibility_examples() {
        let id = MetricTensor::euclidean(dim1());
        for kind in StructureKind::ALL {
            let c = metric_compatibility(&id, &op(kind)).unwrap();
            assert!(c.compatible);
            assert_eq!(c.max_violation, 0.0);
            let scaled = MetricTensor::new(DMatrix::identity(4, 4) * 3.7).unwrap();
            assert!(metric_compatibility(&scaled, &op(kind)).unwrap().compatible);
        }
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        // singular, so not a metric, but compatibility only needs the matrix
        assert!(MetricTensor::new(m.clone()).is_err());
        let c = matrix_compatibility(&m, &op(StructureKind::F)).unwrap();
        assert!(!c.compatible);
        assert_eq!(c.max_violation, 2.0);
    }

    #[test]
    fn quadratic_form_is_point_independent() {
        let w = vec![0.5, 1.5, -2.0, 3.0, 1.0, 0.25, 2.0, -1.0];
        let l = BuiltinLagrangian::AnisotropicQuadratic { weights: w }
            .into_field(ChartDim::new(2).unwrap())
            .unwrap();
        let h = StructureOperator::build(StructureKind::H, ChartDim::new(2).unwrap());
        let first = kahler_two_form(&l, &Point::from_slice(&[0.0; 8]).unwrap(), &h).unwrap();
        for k in 1..10 {
            let x: Vec<f64> = (0..8).map(|i| ((k * 7 + i * 3) % 11) as f64 - 5.0).collect();
            let phi = kahler_two_form(&l, &Point::from_slice(&x).unwrap(), &h).unwrap();
            assert_eq!(phi, first);
            assert!((phi.matrix() + phi.matrix().transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn metric_validation() {
        assert!(MetricTensor::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0])).is_err());
        assert!(MetricTensor::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])).is_err());
        assert!(MetricTensor::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn two_form_eval_is_alternating() {
        let phi = TwoForm::new(op(StructureKind::H).to_dense()).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let y = DVector::from_vec(vec![1.0, 0.1, -0.4, 0.9]);
        assert!(phi.eval(&x, &x).unwrap().abs() < 1e-15);
        assert!((phi.eval(&x, &y).unwrap() + phi.eval(&y, &x).unwrap()).abs() < 1e-15);
        assert!(TwoForm::new(DMatrix::identity(3, 3)).is_err());
    }
}
