//! Scalar fields on the chart and their second-order jets.
//!
//! Derivatives come from forward-over-forward automatic differentiation: one
//! [`HyperDual`] pass per coordinate pair `(a, b)` with `a ≤ b`. The central
//! difference oracle in [`fd_oracle`] only ever calls the plain `f64` path.

mod builtin;
mod hyperdual;

use nalgebra::{DMatrix, DVector};

pub use builtin::{BuiltinField, BuiltinLagrangian, GRAVITY_EXCLUSION_RADIUS};
pub use hyperdual::{HyperDual, Scalar};

use crate::error::{check_len, Error, Result};
use crate::structure::ChartDim;

/// A configuration point with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Point { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Point::new(DVector::from_column_slice(coords))
    }

    pub fn origin(dim: ChartDim) -> Self {
        Point {
            coords: DVector::zeros(dim.total()),
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// How much of the jet to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value,
    Gradient,
    Hessian,
}

/// Value, gradient and Hessian of a scalar field at a point. Parts above the
/// requested [`Order`] are left zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub order: Order,
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Evaluates generically over any [`Scalar`]. Anything implementing this is
/// a [`ScalarField`].
pub trait GenericField: Send + Sync {
    fn dim(&self) -> ChartDim;
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<T>;
}

/// Object-safe scalar field `R^{4n} → R`.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> ChartDim;
    fn eval_f64(&self, x: &[f64]) -> Result<f64>;
    fn eval_hyper(&self, x: &[HyperDual]) -> Result<HyperDual>;
}

impl<T: GenericField> ScalarField for T {
    fn dim(&self) -> ChartDim {
        GenericField::dim(self)
    }
    fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }
    fn eval_hyper(&self, x: &[HyperDual]) -> Result<HyperDual> {
        self.eval(x)
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{what} is not finite ({v})")))
    }
}

/// Field value at `p`.
pub fn value(field: &dyn ScalarField, p: &Point) -> Result<f64> {
    check_len(field.dim().total(), p.len())?;
    finite(field.eval_f64(p.coords.as_slice())?, "field value")
}

fn seeded_pass(field: &dyn ScalarField, p: &Point, a: usize, b: usize) -> Result<HyperDual> {
    let x: Vec<HyperDual> = p
        .coords
        .iter()
        .enumerate()
        .map(|(k, &c)| HyperDual::variable(c, f64::from(u8::from(k == a)), f64::from(u8::from(k == b))))
        .collect();
    field.eval_hyper(&x)
}

/// `∂²f/∂x_a∂x_b` from a single pass seeded `(a, b)`. Exposed so the
/// symmetry of independent `(a, b)` and `(b, a)` passes can be checked.
pub fn mixed_partial(field: &dyn ScalarField, p: &Point, a: usize, b: usize) -> Result<f64> {
    let total = field.dim().total();
    check_len(total, p.len())?;
    if a >= total || b >= total {
        return Err(Error::InvalidArgument(format!(
            "partial index ({a}, {b}) out of range for dimension {total}"
        )));
    }
    finite(seeded_pass(field, p, a, b)?.e12, "second derivative")
}

/// Jet of `field` at `p` up to `order`, by forward-mode AD.
pub fn jet(field: &dyn ScalarField, p: &Point, order: Order) -> Result<Jet2> {
    let total = field.dim().total();
    check_len(total, p.len())?;
    let value = value(field, p)?;
    let mut gradient = DVector::zeros(total);
    let mut hessian = DMatrix::zeros(total, total);

    match order {
        Order::Value => {}
        Order::Gradient => {
            for a in 0..total {
                gradient[a] = finite(seeded_pass(field, p, a, a)?.e1, "gradient")?;
            }
        }
        Order::Hessian => {
            for a in 0..total {
                for b in a..total {
                    let r = seeded_pass(field, p, a, b)?;
                    if a == b {
                        gradient[a] = finite(r.e1, "gradient")?;
                    }
                    let h = finite(r.e12, "second derivative")?;
                    hessian[(a, b)] = h;
                    hessian[(b, a)] = h;
                }
            }
        }
    }

    Ok(Jet2 {
        order,
        value,
        gradient,
        hessian,
    })
}

/// Central-difference gradient and Hessian with the given step. Uses only
/// plain `f64` evaluations. Errors are O(step²).
pub fn fd_oracle(field: &dyn ScalarField, p: &Point, step: f64) -> Result<Jet2> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {step}"
        )));
    }
    let total = field.dim().total();
    check_len(total, p.len())?;
    let x0 = p.coords.as_slice();
    let f = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut x = x0.to_vec();
        for &(k, d) in shifts {
            x[k] += d;
        }
        finite(field.eval_f64(&x)?, "field value")
    };

    let value = f(&[])?;
    let h = step;
    let mut gradient = DVector::zeros(total);
    let mut hessian = DMatrix::zeros(total, total);
    for a in 0..total {
        let fp = f(&[(a, h)])?;
        let fm = f(&[(a, -h)])?;
        gradient[a] = (fp - fm) / (2.0 * h);
        hessian[(a, a)] = (fp - 2.0 * value + fm) / (h * h);
        for b in 0..a {
            let fpp = f(&[(a, h), (b, h)])?;
            let fpm = f(&[(a, h), (b, -h)])?;
            let fmp = f(&[(a, -h), (b, h)])?;
            let fmm = f(&[(a, -h), (b, -h)])?;
            let d = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hessian[(a, b)] = d;
            hessian[(b, a)] = d;
        }
    }

    Ok(Jet2 {
        order: Order::Hessian,
        value,
        gradient,
        hessian,
    })
}
