use super::{parse, BinOp, Expr, ExprKind, Func};
use crate::calculus::{GenericField, Scalar};
use crate::error::{Error, Result};
use crate::structure::ChartDim;

impl Expr {
    /// Interprets the tree over any scalar type. Domain violations report the
    /// span of the offending node.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<T> {
        match &self.kind {
            ExprKind::Const(v) => Ok(T::constant(*v)),
            ExprKind::Var(i) => x.get(*i).copied().ok_or(Error::DimensionMismatch {
                expected: i + 1,
                got: x.len(),
            }),
            ExprKind::Neg(e) => Ok(-e.eval(x)?),
            ExprKind::Call(func, arg) => {
                let a = arg.eval(x)?;
                match func {
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Exp => Ok(a.exp()),
                    Func::Sqrt => {
                        if a.re() < 0.0 {
                            Err(Error::domain_at(
                                format!("sqrt of negative value {}", a.re()),
                                self.span,
                            ))
                        } else if a.re() == 0.0 && !a.is_constant() {
                            Err(Error::domain_at("sqrt is not differentiable at 0", self.span))
                        } else {
                            Ok(a.sqrt())
                        }
                    }
                    Func::Abs => {
                        if a.re() == 0.0 && !a.is_constant() {
                            Err(Error::domain_at("abs is not differentiable at 0", self.span))
                        } else {
                            Ok(a.abs())
                        }
                    }
                }
            }
            ExprKind::Binary(op, l, r) => {
                if *op == BinOp::Pow {
                    return self.eval_pow(l, r, x);
                }
                let (a, b) = (l.eval(x)?, r.eval(x)?);
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b.re() == 0.0 {
                            Err(Error::domain_at("division by zero", self.span))
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinOp::Pow => unreachable!(),
                }
            }
        }
    }

    /// Integer exponents that do not depend on the variables use repeated
    /// multiplication semantics (any base). Everything else is `exp(e·ln b)`
    /// and needs a positive base.
    fn eval_pow<T: Scalar>(&self, base: &Expr, exponent: &Expr, x: &[T]) -> Result<T> {
        let b = base.eval(x)?;
        if exponent.is_constant() {
            let k = exponent.eval::<f64>(&[])?;
            if k.fract() == 0.0 && k.abs() <= f64::from(i32::MAX) {
                let k = k as i32;
                if k < 0 && b.re() == 0.0 {
                    return Err(Error::domain_at("zero raised to a negative power", self.span));
                }
                return Ok(b.powi(k));
            }
        }
        let e = exponent.eval(x)?;
        if b.re() <= 0.0 {
            return Err(Error::domain_at(
                format!("non-positive base {} with non-integer or variable exponent", b.re()),
                self.span,
            ));
        }
        Ok((e * b.ln()).exp())
    }
}

/// A parsed expression bound to a chart.
#[derive(Debug, Clone)]
pub struct DslField {
    expr: Expr,
    dim: ChartDim,
}

impl DslField {
    pub fn parse(src: &str, dim: ChartDim) -> Result<Self> {
        eval_as_field(parse(src, dim)?, dim)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

/// Binds `e` to `dim`, checking every variable is in range.
pub fn eval_as_field(e: Expr, dim: ChartDim) -> Result<DslField> {
    if let Some(i) = e.max_var() {
        if i >= dim.total() {
            return Err(Error::InvalidArgument(format!(
                "expression uses x{i} but the chart has only {} coordinates",
                dim.total()
            )));
        }
    }
    Ok(DslField { expr: e, dim })
}

impl GenericField for DslField {
    fn dim(&self) -> ChartDim {
        self.dim
    }

    fn eval<T: Scalar>(&self, x: &[T]) -> Result<T> {
        self.expr.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{jet, Order, Point};
    use crate::dsl::Span;
    use nalgebra::DMatrix;

    fn dim1() -> ChartDim {
        ChartDim::new(1).unwrap()
    }

    fn field(src: &str) -> DslField {
        DslField::parse(src, dim1()).unwrap()
    }

    fn at(c: &[f64]) -> Point {
        Point::from_slice(c).unwrap()
    }

    #[test]
    fn values() {
        let f = field("0.5*(x0^2+x1^2+x2^2+x3^2)");
        assert_eq!(f.expr.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 15.0);
        let g = field("0.5*(x0^2+x1^2+x2^2+x3^2) - 9.8*sqrt(x0^2+x1^2+x2^2+x3^2)");
        // 12.5 - 9.8 * 5
        assert!((g.expr.eval(&[3.0, 0.0, 4.0, 0.0]).unwrap() - (-36.5)).abs() < 1e-12);
        assert_eq!(field("1+2*3^2").expr.eval::<f64>(&[0.0; 4]).unwrap(), 19.0);
        assert_eq!(field("2^3^2").expr.eval::<f64>(&[0.0; 4]).unwrap(), 512.0);
        assert_eq!(field("(-2)^3").expr.eval::<f64>(&[0.0; 4]).unwrap(), -8.0);
        assert_eq!(field("-x0^2").expr.eval(&[3.0, 0.0, 0.0, 0.0]).unwrap(), 9.0);
    }

    #[test]
    fn product_jet() {
        let f = field("x0*x1");
        let j = jet(&f, &at(&[2.0, 3.0, 0.0, 0.0]), Order::Hessian).unwrap();
        assert_eq!(j.value, 6.0);
        assert_eq!(j.gradient.as_slice(), &[3.0, 2.0, 0.0, 0.0]);
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 1)] = 1.0;
        h[(1, 0)] = 1.0;
        assert_eq!(j.hessian, h);
    }

    #[test]
    fn sine_jet_at_zero() {
        let j = jet(&field("sin(x0)"), &at(&[0.0; 4]), Order::Hessian).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.gradient.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(j.hessian.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn domain_errors_cite_node() {
        let src = "1 + sqrt(x0)";
        let f = DslField::parse(src, dim1()).unwrap();
        match jet(&f, &at(&[-1.0, 0.0, 0.0, 0.0]), Order::Value) {
            Err(Error::Domain { span: Some(span), .. }) => {
                assert_eq!(span, Span::new(4, 12));
                assert_eq!(&src[span.start..span.end], "sqrt(x0)");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        let f = field("x1 / x0");
        assert!(matches!(
            jet(&f, &at(&[0.0, 1.0, 0.0, 0.0]), Order::Value),
            Err(Error::Domain { .. })
        ));
        let f = field("x0 ^ 0.5");
        assert!(f.expr.eval(&[-1.0, 0.0, 0.0, 0.0]).is_err());
        let f = field("x0 ^ -1");
        assert!(f.expr.eval(&[0.0, 0.0, 0.0, 0.0]).is_err());
        let f = field("abs(x0)");
        assert!(jet(&f, &at(&[0.0; 4]), Order::Gradient).is_err());
        assert!(jet(&f, &at(&[-2.0, 0.0, 0.0, 0.0]), Order::Gradient).is_ok());
    }

    #[test]
    fn general_power() {
        let f = field("x0 ^ 1.5");
        let j = jet(&f, &at(&[4.0, 0.0, 0.0, 0.0]), Order::Hessian).unwrap();
        assert!((j.value - 8.0).abs() < 1e-12);
        assert!((j.gradient[0] - 3.0).abs() < 1e-12);
        assert!((j.hessian[(0, 0)] - 0.75 * 0.5).abs() < 1e-12);
        let f = field("2 ^ x1");
        let j = jet(&f, &at(&[0.0, 3.0, 0.0, 0.0]), Order::Gradient).unwrap();
        assert!((j.gradient[1] - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn field_rejects_out_of_range_expr() {
        let e = parse("x7", ChartDim::new(2).unwrap()).unwrap();
        assert!(eval_as_field(e, dim1()).is_err());
    }
}
