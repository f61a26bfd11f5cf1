//! Built-in Lagrangians, all functions of the base coordinates only.
//!
//! The kinetic term is the quadratic form `½ m ‖x‖²` over all four blocks;
//! the gravity potential uses the distance to the origin as height.

use std::fmt;
use std::str::FromStr;

use super::{GenericField, Scalar};
use crate::error::{Error, Result};
use crate::structure::ChartDim;

/// Points closer than this to the origin are outside the gravity field's
/// domain, where `‖x‖` is not differentiable.
pub const GRAVITY_EXCLUSION_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinLagrangian {
    /// `½ m ‖x‖²`
    FreeQuadratic { m: f64 },
    /// `½ m ‖x‖² − m g ‖x‖`
    Gravity { m: f64, g: f64 },
    /// `½ Σ_a w_a x_a²`
    AnisotropicQuadratic { weights: Vec<f64> },
}

impl BuiltinLagrangian {
    pub fn validate(&self, dim: ChartDim) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            BuiltinLagrangian::FreeQuadratic { m } if !(m.is_finite() && *m > 0.0) => {
                bad(format!("mass must be positive, got {m}"))
            }
            BuiltinLagrangian::Gravity { m, .. } if !(m.is_finite() && *m > 0.0) => {
                bad(format!("mass must be positive, got {m}"))
            }
            BuiltinLagrangian::Gravity { g, .. } if !(g.is_finite() && *g >= 0.0) => {
                bad(format!("gravity must be non-negative, got {g}"))
            }
            BuiltinLagrangian::AnisotropicQuadratic { weights } => {
                if weights.len() != dim.total() {
                    return bad(format!(
                        "anisotropic_quadratic needs {} weights, got {}",
                        dim.total(),
                        weights.len()
                    ));
                }
                match weights.iter().find(|w| !(w.is_finite() && **w != 0.0)) {
                    Some(w) => bad(format!("weights must be finite and non-zero, got {w}")),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn into_field(self, dim: ChartDim) -> Result<BuiltinField> {
        self.validate(dim)?;
        Ok(BuiltinField { dim, kind: self })
    }
}

impl fmt::Display for BuiltinLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinLagrangian::FreeQuadratic { m } => write!(f, "free_quadratic:{m}"),
            BuiltinLagrangian::Gravity { m, g } => write!(f, "gravity:{m},{g}"),
            BuiltinLagrangian::AnisotropicQuadratic { weights } => {
                let w: Vec<String> = weights.iter().map(f64::to_string).collect();
                write!(f, "anisotropic_quadratic:{}", w.join(","))
            }
        }
    }
}

/// Parses `name[:p1,p2,...]`. Defaults: `free_quadratic` → m = 1,
/// `gravity` → m = 1, g = 9.8.
impl FromStr for BuiltinLagrangian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let values: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad builtin parameter '{}'", t.trim())))
                })
                .collect::<Result<_>>()?
        };
        let arity = |expected: &[usize]| {
            if expected.contains(&values.len()) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "builtin '{name}' takes {expected:?} parameters, got {}",
                    values.len()
                )))
            }
        };
        match name {
            "free_quadratic" => {
                arity(&[0, 1])?;
                Ok(BuiltinLagrangian::FreeQuadratic {
                    m: values.first().copied().unwrap_or(1.0),
                })
            }
            "gravity" => {
                arity(&[0, 2])?;
                let (m, g) = if values.is_empty() {
                    (1.0, 9.8)
                } else {
                    (values[0], values[1])
                };
                Ok(BuiltinLagrangian::Gravity { m, g })
            }
            "anisotropic_quadratic" => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument(
                        "anisotropic_quadratic needs one weight per coordinate".into(),
                    ));
                }
                Ok(BuiltinLagrangian::AnisotropicQuadratic { weights: values })
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown builtin '{other}' (expected free_quadratic, gravity or anisotropic_quadratic)"
            ))),
        }
    }
}

/// A validated built-in bound to a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinField {
    dim: ChartDim,
    kind: BuiltinLagrangian,
}

impl BuiltinField {
    pub fn lagrangian(&self) -> &BuiltinLagrangian {
        &self.kind
    }
}

fn norm_squared<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::constant(0.0), |acc, &v| acc + v * v)
}

impl GenericField for BuiltinField {
    fn dim(&self) -> ChartDim {
        self.dim
    }

    fn eval<T: Scalar>(&self, x: &[T]) -> Result<T> {
        let half = T::constant(0.5);
        match &self.kind {
            BuiltinLagrangian::FreeQuadratic { m } => Ok(half * T::constant(*m) * norm_squared(x)),
            BuiltinLagrangian::Gravity { m, g } => {
                let r2 = norm_squared(x);
                if r2.re().sqrt() < GRAVITY_EXCLUSION_RADIUS {
                    return Err(Error::domain(format!(
                        "gravity Lagrangian is not smooth within {GRAVITY_EXCLUSION_RADIUS:e} of the origin"
                    )));
                }
                let m = T::constant(*m);
                Ok(half * m * r2 - m * T::constant(*g) * r2.sqrt())
            }
            BuiltinLagrangian::AnisotropicQuadratic { weights } => Ok(half
                * weights
                    .iter()
                    .zip(x)
                    .fold(T::constant(0.0), |acc, (&w, &v)| acc + T::constant(w) * v * v)),
        }
    }
}
