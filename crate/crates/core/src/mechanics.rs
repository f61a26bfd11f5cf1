//! Liouville fields, energies, the semispray solve and Euler–Lagrange
//! residuals.
//!
//! Velocities `X^a = ẋ_a` are fiber coordinates. They are held fixed when
//! the energy is differentiated, so `dE` has no `∂X/∂x` terms.
//!
//! The semispray solve uses the compact system `Hess · ξ = J ∇L`. For
//! `n ≤ 2` the bracketed coordinate system is also assembled term by term
//! and must agree with the compact one.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::calculus::{jet, Jet2, Order, Point, ScalarField};
use crate::coordinates::{self, LiteralSystem};
use crate::error::{check_len, Error, Result};
use crate::forms::{kahler_from_hessian, OneForm, TwoForm};
use crate::linalg;
use crate::structure::{StructureKind, StructureOperator};

/// Literal-vs-compact agreement required during the semispray solve,
/// relative to `max(1, max |Hess|, max |∇L|)`.
pub const LITERAL_TOL: f64 = 1e-10;
/// Largest block size for which the literal system is assembled on every
/// solve.
pub const LITERAL_CHECK_MAX_N: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Semispray {
    pub velocity: DVector<f64>,
    pub at: DVector<f64>,
    pub structure: StructureKind,
}

impl Semispray {
    pub fn new(velocity: DVector<f64>, at: &Point, structure: StructureKind) -> Result<Self> {
        check_len(at.len(), velocity.len())?;
        if velocity.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("velocity has non-finite entries".into()));
        }
        Ok(Semispray {
            velocity,
            at: at.coords().clone(),
            structure,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    pub structure: StructureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ELResidual {
    pub components: DVector<f64>,
    pub norm: f64,
}

impl ELResidual {
    fn new(components: DVector<f64>) -> Self {
        let norm = components.amax();
        ELResidual { components, norm }
    }

    /// Components of equation family `b` (0..4).
    pub fn block(&self, b: usize) -> &[f64] {
        let n = self.components.len() / 4;
        &self.components.as_slice()[b * n..(b + 1) * n]
    }
}

/// Everything computed during a semispray solve.
#[derive(Debug, Clone)]
pub struct SemisprayDetail {
    pub semispray: Semispray,
    pub jet: Jet2,
    /// 2-norm condition estimate of the Hessian.
    pub cond: f64,
    /// Literal-vs-compact deviation, when the literal system was assembled.
    pub literal_deviation: Option<f64>,
}

/// `V_J = J(ξ)`
pub fn liouville_field(op: &StructureOperator, xi: &Semispray) -> Result<DVector<f64>> {
    check_len(op.dim().total(), xi.velocity.len())?;
    Ok(coordinates::liouville_field(op.kind(), op.dim(), &xi.velocity))
}

fn point_of(xi: &Semispray) -> Result<Point> {
    Point::new(xi.at.clone())
}

/// `E_L^J = V_J(L) − L` at the base point of `xi`.
pub fn energy(field: &dyn ScalarField, xi: &Semispray) -> Result<EnergyValue> {
    check_len(field.dim().total(), xi.velocity.len())?;
    let j = jet(field, &point_of(xi)?, Order::Gradient)?;
    Ok(energy_from_jet(xi.structure, &j, &xi.velocity))
}

pub(crate) fn energy_from_jet(kind: StructureKind, j: &Jet2, velocity: &DVector<f64>) -> EnergyValue {
    let dim = crate::structure::ChartDim::new(velocity.len() / 4).expect("validated length");
    EnergyValue {
        value: coordinates::energy(kind, dim, j.value, &j.gradient, velocity),
        structure: kind,
    }
}

/// `dE_L^J = Hess · (J ξ) − ∇L` with `ξ` held fixed.
pub fn energy_differential(field: &dyn ScalarField, xi: &Semispray) -> Result<OneForm> {
    check_len(field.dim().total(), xi.velocity.len())?;
    let j = jet(field, &point_of(xi)?, Order::Hessian)?;
    Ok(OneForm::new(coordinates::energy_differential(
        xi.structure,
        field.dim(),
        &j.gradient,
        &j.hessian,
        &xi.velocity,
    )))
}

/// `i_ξ Φ`, the covector `Y ↦ Φ(ξ, Y)`.
pub fn interior_product(phi: &TwoForm, xi: &Semispray) -> Result<OneForm> {
    check_len(phi.matrix().nrows(), xi.velocity.len())?;
    Ok(OneForm::new(phi.matrix().transpose() * &xi.velocity))
}

/// Solves `i_ξ Φ_L^J = dE_L^J` for `ξ` at `p`.
pub fn solve_semispray(field: &dyn ScalarField, p: &Point, op: &StructureOperator) -> Result<Semispray> {
    solve_semispray_detailed(field, p, op).map(|d| d.semispray)
}

pub fn solve_semispray_detailed(field: &dyn ScalarField, p: &Point, op: &StructureOperator) -> Result<SemisprayDetail> {
    check_len(op.dim().total(), field.dim().total())?;
    check_len(op.dim().total(), p.len())?;
    let j = jet(field, p, Order::Hessian)?;
    let rhs = op.apply(&j.gradient)?;

    let literal_deviation = if op.dim().n() <= LITERAL_CHECK_MAX_N {
        let literal = LiteralSystem::assemble(op.kind(), op.dim(), &j.gradient, &j.hessian);
        let deviation = literal.deviation_from_compact(&j.hessian, &rhs);
        let scale = j.hessian.amax().max(j.gradient.amax()).max(1.0);
        if deviation.is_nan() || deviation > LITERAL_TOL * scale {
            return Err(Error::Inconsistent {
                what: format!("semispray system for {}", op.kind()),
                deviation,
            });
        }
        Some(deviation)
    } else {
        None
    };

    let (velocity, cond) = linalg::solve(&j.hessian, &rhs)?;
    log::debug!("semispray solve: kind={} cond={cond:.3e}", op.kind());
    Ok(SemisprayDetail {
        semispray: Semispray::new(velocity, p, op.kind())?,
        jet: j,
        cond,
        literal_deviation,
    })
}

/// Euler–Lagrange residual of the system for `op` along a curve through `p`
/// with velocity `v`.
pub fn el_residual(field: &dyn ScalarField, p: &Point, v: &DVector<f64>, op: &StructureOperator) -> Result<ELResidual> {
    check_len(op.dim().total(), field.dim().total())?;
    check_len(op.dim().total(), v.len())?;
    let j = jet(field, p, Order::Hessian)?;
    Ok(el_residual_from_jet(op, &j, v))
}

pub(crate) fn el_residual_from_jet(op: &StructureOperator, j: &Jet2, v: &DVector<f64>) -> ELResidual {
    ELResidual::new(coordinates::el_residual(
        op.kind(),
        op.dim(),
        &j.gradient,
        &j.hessian,
        v,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// `‖i_ξ Φ − dE‖∞`
    pub deviation: f64,
    pub cond: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

/// Solves for `ξ` and measures how well `i_ξ Φ_L^J = dE_L^J` holds.
pub fn dynamics_identity_check(field: &dyn ScalarField, p: &Point, op: &StructureOperator) -> Result<IdentityCheck> {
    let d = solve_semispray_detailed(field, p, op)?;
    let deviation = identity_deviation(op, &d.jet, &d.semispray)?;
    Ok(IdentityCheck {
        deviation,
        cond: d.cond,
        tolerance: 1e-9 * (1.0 + d.cond),
    })
}

/// `‖i_ξ Φ − dE‖∞` for an arbitrary `ξ`, using an already computed jet.
pub fn identity_deviation(op: &StructureOperator, j: &Jet2, xi: &Semispray) -> Result<f64> {
    let phi = kahler_from_hessian(op, &j.hessian)?;
    let lhs = interior_product(&phi, xi)?;
    let rhs = coordinates::energy_differential(op.kind(), op.dim(), &j.gradient, &j.hessian, &xi.velocity);
    Ok((lhs.components - rhs).amax())
}

/// Hessian of `field` at `p` together with its condition estimate.
pub fn hessian_with_condition(field: &dyn ScalarField, p: &Point) -> Result<(DMatrix<f64>, f64)> {
    let j = jet(field, p, Order::Hessian)?;
    let cond = linalg::condition_number(&j.hessian);
    Ok((j.hessian, cond))
}
