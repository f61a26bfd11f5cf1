//! Time integration of `Hess(L) · ẋ = J ∇L`.
//!
//! The implicit system is solved pointwise at every stage. Diagnostics are
//! computed afterwards from the stored states: the energy uses `ξ` re-solved
//! at each sample, and the Euler–Lagrange residual uses a velocity obtained
//! by differencing neighbouring states.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::calculus::{Point, ScalarField};
use crate::error::{check_len, Error, Result};
use crate::mechanics::{el_residual_from_jet, energy_from_jet, solve_semispray, solve_semispray_detailed};
use crate::structure::{StructureKind, StructureOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Rk45Adaptive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Rk45Adaptive => "rk45_adaptive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "rk45" | "rk45_adaptive" => Ok(Method::Rk45Adaptive),
            _ => Err(Error::InvalidArgument(format!(
                "unknown method '{s}' (expected rk4 or rk45)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for rk4; initial step for the adaptive method.
    pub dt: f64,
    pub t_end: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            dt: 1e-3,
            t_end: 10.0,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            dt_min: 1e-12,
            dt_max: 0.1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite (got {v})"
                )))
            }
        };
        positive("dt", self.dt)?;
        positive("t_end", self.t_end)?;
        if self.method == Method::Rk45Adaptive {
            positive("abs_tol", self.abs_tol)?;
            positive("rel_tol", self.rel_tol)?;
            positive("dt_min", self.dt_min)?;
            positive("dt_max", self.dt_max)?;
            if self.dt_min > self.dt_max {
                return Err(Error::InvalidArgument(format!(
                    "dt_min ({}) exceeds dt_max ({})",
                    self.dt_min, self.dt_max
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: DVector<f64>,
    pub energy: f64,
    pub el_residual: f64,
    pub hess_cond: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub structure: StructureKind,
    pub samples: Vec<Sample>,
    /// Local error estimate of each accepted adaptive step, in units of the
    /// acceptance threshold (so every entry is at most 1).
    pub error_ratios: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&DVector<f64>> {
        self.samples.last().map(|s| &s.state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    /// `max_k |E_k − E_0| / |E_0|`, or the absolute drift when `E_0 = 0`.
    pub max_energy_drift_rel: f64,
    pub max_residual: f64,
    pub worst_cond: f64,
    pub steps: usize,
}

impl DriftReport {
    fn from_samples(samples: &[Sample]) -> Self {
        let e0 = samples.first().map_or(0.0, |s| s.energy);
        let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        let mut report = DriftReport {
            max_energy_drift_rel: 0.0,
            max_residual: 0.0,
            worst_cond: 0.0,
            steps: samples.len().saturating_sub(1),
        };
        for s in samples {
            report.max_energy_drift_rel = report.max_energy_drift_rel.max((s.energy - e0).abs() / scale);
            report.max_residual = report.max_residual.max(s.el_residual);
            report.worst_cond = report.worst_cond.max(s.hess_cond);
        }
        report
    }
}

/// An integration that stopped early. The trajectory holds every sample
/// reached before the failure.
#[derive(Debug, Clone, ThisError)]
#[error("{error}")]
pub struct IntegrationFailure {
    pub error: Error,
    pub trajectory: Trajectory,
    pub report: DriftReport,
}

fn velocity(field: &dyn ScalarField, op: &StructureOperator, x: &DVector<f64>) -> Result<DVector<f64>> {
    let p = Point::new(x.clone())?;
    Ok(solve_semispray(field, &p, op)?.velocity)
}

fn stage(field: &dyn ScalarField, op: &StructureOperator, n: usize, t: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
    velocity(field, op, x).map_err(|e| Error::Stage {
        stage: n,
        t,
        source: Box::new(e),
    })
}

/// One classical RK4 step from `(t, state)`.
pub fn step(
    field: &dyn ScalarField,
    op: &StructureOperator,
    t: f64,
    state: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    check_len(op.dim().total(), state.len())?;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let h = dt;
    let k1 = stage(field, op, 1, t, state)?;
    let k2 = stage(field, op, 2, t + 0.5 * h, &(state + &k1 * (0.5 * h)))?;
    let k3 = stage(field, op, 3, t + 0.5 * h, &(state + &k2 * (0.5 * h)))?;
    let k4 = stage(field, op, 4, t + h, &(state + &k3 * h))?;
    Ok(state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

// Dormand–Prince 5(4)
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
#[rustfmt::skip]
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order state and `‖y5 − y4‖∞`.
fn dp_step(
    field: &dyn ScalarField,
    op: &StructureOperator,
    t: f64,
    x: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, f64)> {
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    for i in 0..7 {
        let mut xi = x.clone();
        for (j, kj) in k.iter().enumerate() {
            if DP_A[i][j] != 0.0 {
                xi += kj * (h * DP_A[i][j]);
            }
        }
        k.push(stage(field, op, i + 1, t + DP_C[i] * h, &xi)?);
    }
    let mut y5 = x.clone();
    let mut diff = DVector::zeros(x.len());
    for i in 0..7 {
        y5 += &k[i] * (h * DP_B5[i]);
        diff += &k[i] * (h * (DP_B5[i] - DP_B4[i]));
    }
    Ok((y5, diff.amax()))
}

fn fixed_times(dt: f64, t_end: f64) -> Vec<f64> {
    let r = t_end / dt;
    let steps = if (r - r.round()).abs() <= 1e-9 * r.max(1.0) {
        r.round()
    } else {
        r.ceil()
    }
    .max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(t_end);
    times
}

/// Propagates the state; on failure returns what was reached.
fn propagate(
    field: &dyn ScalarField,
    op: &StructureOperator,
    x0: &DVector<f64>,
    cfg: &IntegratorConfig,
) -> (Vec<f64>, Vec<DVector<f64>>, Vec<f64>, Option<Error>) {
    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];
    let mut ratios = Vec::new();
    match cfg.method {
        Method::Rk4 => {
            let grid = fixed_times(cfg.dt, cfg.t_end);
            for w in grid.windows(2) {
                let x = states.last().unwrap();
                match step(field, op, w[0], x, w[1] - w[0]) {
                    Ok(next) => {
                        times.push(w[1]);
                        states.push(next);
                    }
                    Err(e) => return (times, states, ratios, Some(e)),
                }
            }
        }
        Method::Rk45Adaptive => {
            let mut t = 0.0;
            let mut h = cfg.dt.clamp(cfg.dt_min, cfg.dt_max);
            while t < cfg.t_end {
                let x = states.last().unwrap().clone();
                let clipped = t + h >= cfg.t_end;
                let h_try = if clipped { cfg.t_end - t } else { h };
                let (y, err) = match dp_step(field, op, t, &x, h_try) {
                    Ok(r) => r,
                    Err(e) => return (times, states, ratios, Some(e)),
                };
                let threshold = cfg.abs_tol + cfg.rel_tol * x.amax().max(y.amax());
                let ratio = err / threshold;
                if ratio <= 1.0 {
                    t = if clipped { cfg.t_end } else { t + h_try };
                    times.push(t);
                    states.push(y);
                    ratios.push(ratio);
                } else if h_try <= cfg.dt_min {
                    return (times, states, ratios, Some(Error::StepSizeUnderflow { t, dt: h_try }));
                }
                let factor = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h_try * factor).clamp(cfg.dt_min, cfg.dt_max);
            }
        }
    }
    (times, states, ratios, None)
}

/// Second-order finite-difference velocities on a possibly nonuniform grid.
fn differenced_velocities(times: &[f64], states: &[DVector<f64>]) -> Vec<Option<DVector<f64>>> {
    let m = states.len();
    if m < 2 {
        return vec![None; m];
    }
    if m == 2 {
        let v = (&states[1] - &states[0]) / (times[1] - times[0]);
        return vec![Some(v.clone()), Some(v)];
    }
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        // three consecutive nodes containing k
        let c = k.clamp(1, m - 2);
        let (t0, t1, t2) = (times[c - 1], times[c], times[c + 1]);
        let t = times[k];
        // derivative of the Lagrange interpolant at t
        let w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
        let w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
        let w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
        out.push(Some(&states[c - 1] * w0 + &states[c] * w1 + &states[c + 1] * w2));
    }
    out
}

fn diagnose(
    field: &dyn ScalarField,
    op: &StructureOperator,
    times: &[f64],
    states: &[DVector<f64>],
) -> (Vec<Sample>, Option<Error>) {
    let velocities = differenced_velocities(times, states);
    let mut samples = Vec::with_capacity(states.len());
    for ((&t, x), v) in times.iter().zip(states).zip(velocities) {
        let detail = match Point::new(x.clone()).and_then(|p| solve_semispray_detailed(field, &p, op)) {
            Ok(d) => d,
            Err(e) => return (samples, Some(e)),
        };
        let energy = energy_from_jet(op.kind(), &detail.jet, &detail.semispray.velocity).value;
        let v = v.unwrap_or_else(|| detail.semispray.velocity.clone());
        let el_residual = el_residual_from_jet(op, &detail.jet, &v).norm;
        samples.push(Sample {
            t,
            state: x.clone(),
            energy,
            el_residual,
            hess_cond: detail.cond,
        });
    }
    (samples, None)
}

/// Integrates from `x0` over `[0, cfg.t_end]`.
///
/// The fixed-step method samples at `t_k = k·dt`, with the last step
/// shortened to land on `t_end`. The adaptive method samples at every
/// accepted step.
pub fn integrate(
    field: &dyn ScalarField,
    op: &StructureOperator,
    x0: &Point,
    cfg: &IntegratorConfig,
) -> std::result::Result<(Trajectory, DriftReport), Box<IntegrationFailure>> {
    let fail_early = |error: Error| {
        Box::new(IntegrationFailure {
            error,
            trajectory: Trajectory {
                structure: op.kind(),
                samples: Vec::new(),
                error_ratios: Vec::new(),
            },
            report: DriftReport::from_samples(&[]),
        })
    };
    cfg.validate().map_err(fail_early)?;
    check_len(op.dim().total(), field.dim().total()).map_err(fail_early)?;
    check_len(op.dim().total(), x0.len()).map_err(fail_early)?;

    let (times, states, error_ratios, step_error) = propagate(field, op, x0.coords(), cfg);
    let (samples, diag_error) = diagnose(field, op, &times, &states);
    let trajectory = Trajectory {
        structure: op.kind(),
        samples,
        error_ratios,
    };
    let report = DriftReport::from_samples(&trajectory.samples);
    log::info!(
        "integrated {} steps, energy drift {:.3e}, max residual {:.3e}",
        report.steps,
        report.max_energy_drift_rel,
        report.max_residual
    );
    match step_error.or(diag_error) {
        None => Ok((trajectory, report)),
        Some(error) => Err(Box::new(IntegrationFailure {
            error,
            trajectory,
            report,
        })),
    }
}

/// `exp(tJ) · x0 = cos t · x0 + sin t · J x0`, the exact flow of the free
/// quadratic Lagrangian for any mass.
pub fn analytic_oracle_quadratic(m: f64, op: &StructureOperator, x0: &Point, t: f64) -> Result<DVector<f64>> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass must be positive (got {m})")));
    }
    let jx = op.apply(x0.coords())?;
    Ok(x0.coords() * t.cos() + jx * t.sin())
}

/// Writes `t,x0,...,x{4n-1},energy,el_residual,hess_cond` rows with 17
/// significant digits.
pub fn write_csv<W: Write>(traj: &Trajectory, total: usize, mut w: W) -> std::io::Result<()> {
    let mut header = String::from("t");
    for i in 0..total {
        header.push_str(&format!(",x{i}"));
    }
    header.push_str(",energy,el_residual,hess_cond");
    writeln!(w, "{header}")?;
    for s in &traj.samples {
        let mut row = format!("{:.16e}", s.t);
        for x in s.state.iter() {
            row.push_str(&format!(",{x:.16e}"));
        }
        row.push_str(&format!(
            ",{:.16e},{:.16e},{:.16e}",
            s.energy, s.el_residual, s.hess_cond
        ));
        writeln!(w, "{row}")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::BuiltinLagrangian;
    use crate::structure::ChartDim;

    fn dim(n: usize) -> ChartDim {
        ChartDim::new(n).unwrap()
    }

    fn free(n: usize) -> impl ScalarField {
        BuiltinLagrangian::FreeQuadratic { m: 1.0 }.into_field(dim(n)).unwrap()
    }

    fn at(c: &[f64]) -> Point {
        Point::from_slice(c).unwrap()
    }

    #[test]
    fn rk4_step_matches_rotation() {
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let y = step(&free(1), &o, 0.0, &x, 0.1).unwrap();
        let exact = DVector::from_vec(vec![0.1f64.cos(), 0.1f64.sin(), 0.0, 0.0]);
        assert!((y - exact).amax() < 1e-7);
        assert_eq!(step(&free(1), &o, 0.0, &x, 0.0).unwrap(), x);
    }

    #[test]
    fn stage_errors_carry_stage_info() {
        let g = BuiltinLagrangian::Gravity { m: 1.0, g: 9.8 }
            .into_field(dim(1))
            .unwrap();
        let o = StructureOperator::build(StructureKind::F, dim(1));
        match step(&g, &o, 2.5, &DVector::zeros(4), 0.1) {
            Err(Error::Stage { stage, t, source }) => {
                assert_eq!(stage, 1);
                assert_eq!(t, 2.5);
                assert!(matches!(*source, Error::Domain { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rk4_order() {
        let o = StructureOperator::build(StructureKind::H, dim(1));
        let x0 = at(&[0.3, -0.5, 1.0, 0.2]);
        let exact = analytic_oracle_quadratic(1.0, &o, &x0, 1.0).unwrap();
        let err = |dt: f64| {
            let cfg = IntegratorConfig {
                dt,
                t_end: 1.0,
                ..Default::default()
            };
            let (traj, _) = integrate(&free(1), &o, &x0, &cfg).unwrap();
            (traj.final_state().unwrap() - &exact).amax()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn sample_grid() {
        let t = fixed_times(1e-3, 10.0);
        assert_eq!(t.len(), 10001);
        assert_eq!(*t.last().unwrap(), 10.0);
        let t = fixed_times(0.3, 1.0);
        assert_eq!(t.len(), 5);
        assert!((t[3] - 0.9).abs() < 1e-15);
        assert_eq!(t[4], 1.0);
        assert_eq!(fixed_times(5.0, 1.0), vec![0.0, 1.0]);
    }

    #[test]
    fn fixed_point_at_origin() {
        let o = StructureOperator::build(StructureKind::G, dim(1));
        let cfg = IntegratorConfig {
            dt: 0.01,
            t_end: 0.5,
            ..Default::default()
        };
        let (traj, report) = integrate(&free(1), &o, &Point::origin(dim(1)), &cfg).unwrap();
        assert!(traj.samples.iter().all(|s| s.state == DVector::zeros(4)));
        assert_eq!(report.max_energy_drift_rel, 0.0);
        assert_eq!(report.steps, 50);
    }

    #[test]
    fn oracle_examples() {
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let x0 = at(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            analytic_oracle_quadratic(1.0, &o, &x0, 0.0).unwrap(),
            x0.coords().clone()
        );
        let q = analytic_oracle_quadratic(1.0, &o, &x0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((q - DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0])).amax() < 1e-15);
        let y = at(&[0.2, -1.0, 3.0, 0.7]);
        for t in [0.3, 2.0, -7.5, 100.0] {
            let r = analytic_oracle_quadratic(2.0, &o, &y, t).unwrap();
            assert!((r.norm() - y.coords().norm()).abs() < 1e-14);
        }
        assert!(analytic_oracle_quadratic(0.0, &o, &y, 1.0).is_err());
    }

    #[test]
    fn adaptive_respects_tolerance() {
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let x0 = at(&[1.0, 0.5, -0.2, 0.3]);
        let cfg = IntegratorConfig {
            method: Method::Rk45Adaptive,
            dt: 0.01,
            t_end: 3.0,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            ..Default::default()
        };
        let (traj, _) = integrate(&free(1), &o, &x0, &cfg).unwrap();
        assert!(!traj.error_ratios.is_empty());
        assert!(traj.error_ratios.iter().all(|&r| r <= 1.0));
        assert_eq!(traj.samples.last().unwrap().t, 3.0);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
        let exact = analytic_oracle_quadratic(1.0, &o, &x0, 3.0).unwrap();
        assert!((traj.final_state().unwrap() - exact).amax() < 1e-6);
    }

    #[test]
    fn adaptive_underflow() {
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let cfg = IntegratorConfig {
            method: Method::Rk45Adaptive,
            dt: 0.5,
            t_end: 1.0,
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            dt_min: 0.1,
            dt_max: 0.5,
        };
        let err = integrate(&free(1), &o, &at(&[1.0, 0.0, 0.0, 0.0]), &cfg).unwrap_err();
        assert!(matches!(err.error, Error::StepSizeUnderflow { .. }));
        assert_eq!(err.trajectory.samples.len(), 1);
    }

    #[test]
    fn failure_keeps_partial_trajectory() {
        // the rotation carries x0 below zero, outside the domain of sqrt
        let src = "0.5*(x0*x0 + x1*x1 + x2*x2 + x3*x3) + 0.001*sqrt(x0)";
        let l = crate::dsl::DslField::parse(src, dim(1)).unwrap();
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let cfg = IntegratorConfig {
            dt: 0.01,
            t_end: 5.0,
            ..Default::default()
        };
        let failure = integrate(&l, &o, &at(&[0.5, 0.0, 0.0, 0.0]), &cfg).unwrap_err();
        assert!(matches!(failure.error, Error::Stage { .. }));
        assert!(!failure.trajectory.samples.is_empty());
        assert!(failure.trajectory.samples.last().unwrap().t < 5.0);
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        assert!(IntegratorConfig {
            dt: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(IntegratorConfig {
            t_end: f64::NAN,
            ..Default::default()
        }
        .validate()
        .is_err());
        let bad = IntegratorConfig {
            method: Method::Rk45Adaptive,
            dt_min: 1.0,
            dt_max: 0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("rk45".parse::<Method>().unwrap(), Method::Rk45Adaptive);
        assert!("euler".parse::<Method>().is_err());
    }

    #[test]
    fn csv_layout() {
        let o = StructureOperator::build(StructureKind::F, dim(1));
        let cfg = IntegratorConfig {
            dt: 0.5,
            t_end: 1.0,
            ..Default::default()
        };
        let (traj, _) = integrate(&free(1), &o, &at(&[1.0, 0.0, 0.0, 0.0]), &cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&traj, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x0,x1,x2,x3,energy,el_residual,hess_cond");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
        assert_eq!(lines[2].split(',').count(), 8);
    }

    #[test]
    fn differencing_is_exact_for_quadratics() {
        let times = [0.0, 0.1, 0.35, 0.4];
        let states: Vec<DVector<f64>> = times
            .iter()
            .map(|&t| DVector::from_vec(vec![t * t, 3.0 * t - 1.0]))
            .collect();
        for (k, v) in differenced_velocities(&times, &states).into_iter().enumerate() {
            let v = v.unwrap();
            assert!((v[0] - 2.0 * times[k]).abs() < 1e-12);
            assert!((v[1] - 3.0).abs() < 1e-12);
        }
    }
}
